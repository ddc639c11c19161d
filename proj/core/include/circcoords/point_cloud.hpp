#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace circcoords {

/// Ordered, non-empty set of finite points in R^dim, stored row-major.
class PointCloud {
 public:
  PointCloud(std::size_t dim, std::vector<double> flat);

  static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const noexcept { return size_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> operator[](std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }

  double squared_distance(std::size_t i, std::size_t j) const noexcept;
  double distance(std::size_t i, std::size_t j) const noexcept;

  /// Points at the given indices, in the given order.
  PointCloud subset(std::span<const std::size_t> indices) const;

  const std::vector<double>& data() const noexcept { return data_; }

 private:
  std::size_t dim_;
  std::size_t size_;
  std::vector<double> data_;
};

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// Dense row-major n x n matrix of Euclidean distances.
std::vector<double> pairwise_distances(const PointCloud& cloud);

}  // namespace circcoords
