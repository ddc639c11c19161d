#include "circcoords/point_cloud.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace circcoords {

PointCloud::PointCloud(std::size_t dim, std::vector<double> flat)
    : dim_(dim), size_(0), data_(std::move(flat)) {
  if (dim_ == 0) throw std::invalid_argument("PointCloud: ambient dimension must be positive");
  if (data_.empty()) throw std::invalid_argument("PointCloud: no points");
  if (data_.size() % dim_ != 0)
    throw std::invalid_argument("PointCloud: coordinate count is not a multiple of the dimension");
  for (double x : data_) {
    if (!std::isfinite(x)) throw std::invalid_argument("PointCloud: non-finite coordinate");
  }
  size_ = data_.size() / dim_;
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("PointCloud: no points");
  const std::size_t dim = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim)
      throw std::invalid_argument("PointCloud: row " + std::to_string(i) + " has length " +
                                  std::to_string(rows[i].size()) + ", expected " +
                                  std::to_string(dim));
    flat.insert(flat.end(), rows[i].begin(), rows[i].end());
  }
  return PointCloud(dim, std::move(flat));
}

double PointCloud::squared_distance(std::size_t i, std::size_t j) const noexcept {
  return circcoords::squared_distance((*this)[i], (*this)[j]);
}

double PointCloud::distance(std::size_t i, std::size_t j) const noexcept {
  return std::sqrt(squared_distance(i, j));
}

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
  std::vector<double> flat;
  flat.reserve(indices.size() * dim_);
  for (std::size_t idx : indices) {
    if (idx >= size_) throw std::out_of_range("PointCloud::subset: index out of range");
    const auto row = (*this)[idx];
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return PointCloud(dim_, std::move(flat));
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

std::vector<double> pairwise_distances(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = cloud.distance(i, j);
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }
  return dist;
}

}  // namespace circcoords
