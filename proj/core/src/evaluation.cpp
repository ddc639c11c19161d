#include "circcoords/evaluation.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "circcoords/circle.hpp"
#include "circcoords/random.hpp"

namespace circcoords {

double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: argument must be positive");
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  // Asymptotic series with Bernoulli numbers B2..B14.
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 -
                                      inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12.0))))));
  return result + std::log(x) - 0.5 * inv - series;
}

MetricSample MetricSample::euclidean(const PointCloud& cloud) {
  MetricSample s;
  s.size_ = cloud.size();
  s.dim_ = cloud.dim();
  s.data_ = cloud.data();
  return s;
}

MetricSample MetricSample::circular(std::vector<double> angles) {
  MetricSample s;
  s.size_ = angles.size();
  s.dim_ = 1;
  s.data_ = std::move(angles);
  s.circular_ = true;
  return s;
}

double MetricSample::distance(std::size_t i, std::size_t j) const noexcept {
  if (circular_) return circle_distance(data_[i], data_[j]);
  return std::sqrt(squared_distance({data_.data() + i * dim_, dim_}, {data_.data() + j * dim_, dim_}));
}

MIEstimate ksg_mi(const MetricSample& xs, const MetricSample& ys, int k) {
  if (k < 1) throw std::invalid_argument("ksg_mi: k must be positive");
  const std::size_t n = xs.size();
  if (ys.size() != n) throw std::invalid_argument("ksg_mi: samples differ in length");
  const auto kk = static_cast<std::size_t>(k);
  if (n < kk + 1) throw std::invalid_argument("ksg_mi: need more than k points");

  auto jitter = [](std::size_t i, std::size_t j) {
    return kKsgTieJitter * keyed_uniform(0x6b7367ULL, std::min(i, j), std::max(i, j));
  };

  std::vector<double> dx(n);
  std::vector<double> dy(n);
  std::vector<std::size_t> order(n - 1);
  double excess_x = 0.0;
  double excess_y = 0.0;
  const double psi_k = digamma(static_cast<double>(k));
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double h = jitter(i, j);
      dx[j] = xs.distance(i, j) + h;
      dy[j] = ys.distance(i, j) + h;
      order[m++] = j;
    }
    auto joint_less = [&](std::size_t a, std::size_t b) {
      const double da = std::max(dx[a], dy[a]);
      const double db = std::max(dx[b], dy[b]);
      return da != db ? da < db : a < b;
    };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kk - 1), order.end(),
                     joint_less);
    double half_x = 0.0;
    double half_y = 0.0;
    for (std::size_t r = 0; r < kk; ++r) {
      half_x = std::max(half_x, dx[order[r]]);
      half_y = std::max(half_y, dy[order[r]]);
    }
    std::size_t nx = 0;
    std::size_t ny = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      nx += dx[j] <= half_x;
      ny += dy[j] <= half_y;
    }
    excess_x += digamma(static_cast<double>(nx)) - psi_k;
    excess_y += digamma(static_cast<double>(ny)) - psi_k;
  }

  MIEstimate est;
  est.k_neighbors = k;
  est.sample_count = n;
  est.tie_jitter = kKsgTieJitter;
  est.maximum = digamma(static_cast<double>(n)) - psi_k - 1.0 / static_cast<double>(k);
  // Written as I_max minus the excess counts so identical samples give I_max exactly.
  est.value = est.maximum - (excess_x + excess_y) / static_cast<double>(n);
  est.normalized = est.value / est.maximum;
  return est;
}

double circular_rmse_aligned(std::span<const double> coord, std::span<const double> truth) {
  if (coord.empty()) throw std::invalid_argument("circular_rmse_aligned: empty domain");
  if (coord.size() != truth.size())
    throw std::invalid_argument("circular_rmse_aligned: lengths differ");
  const std::size_t n = coord.size();
  double best = std::numeric_limits<double>::infinity();
  for (int reflect = 0; reflect < 2; ++reflect) {
    const double sign = reflect ? -1.0 : 1.0;
    double c = 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = truth[i] - sign * coord[i];
      c += std::cos(r);
      s += std::sin(r);
    }
    const double rotation = (c == 0.0 && s == 0.0) ? 0.0 : std::atan2(s, c);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = circle_distance(rotation + sign * coord[i], truth[i]);
      total += d * d;
    }
    best = std::min(best, std::sqrt(total / static_cast<double>(n)));
  }
  return best;
}

long winding_number(std::span<const double> angles, std::span<const std::size_t> path) {
  if (path.size() < 2 || path.front() != path.back())
    throw std::invalid_argument("winding_number: path must be closed");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    total += principal_difference(angles[path[i + 1]], angles[path[i]]);
  }
  return std::lround(total / kTwoPi);
}

std::vector<std::size_t> ordering_path(std::span<const double> parameter) {
  std::vector<std::size_t> path(parameter.size());
  std::iota(path.begin(), path.end(), std::size_t{0});
  std::stable_sort(path.begin(), path.end(),
                   [&](std::size_t a, std::size_t b) { return parameter[a] < parameter[b]; });
  if (!path.empty()) path.push_back(path.front());
  return path;
}

PairedTTest paired_t_test_greater(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_t_test_greater: lengths differ");
  const std::size_t n = a.size();
  if (n < 2) throw std::invalid_argument("paired_t_test_greater: need at least two pairs");
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  PairedTTest out;
  out.mean_difference = mean;
  out.degrees_of_freedom = n - 1;
  if (sd == 0.0) {
    if (mean == 0.0) {
      out.t_statistic = 0.0;
      out.p_value = 0.5;
    } else {
      out.t_statistic = mean > 0.0 ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity();
      out.p_value = mean > 0.0 ? 0.0 : 1.0;
    }
    return out;
  }
  out.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.t_statistic));
  return out;
}

ChiSquareTest chi_square_uniform(std::span<const double> angles, std::size_t bins) {
  if (bins < 2) throw std::invalid_argument("chi_square_uniform: need at least two bins");
  if (angles.empty()) throw std::invalid_argument("chi_square_uniform: no angles");
  std::vector<double> counts(bins, 0.0);
  for (double a : angles) {
    auto b = static_cast<std::size_t>(wrap_angle(a) / kTwoPi * static_cast<double>(bins));
    counts[std::min(b, bins - 1)] += 1.0;
  }
  const double expected = static_cast<double>(angles.size()) / static_cast<double>(bins);
  ChiSquareTest out;
  out.bins = bins;
  for (double c : counts) out.statistic += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(static_cast<double>(bins - 1));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

}  // namespace circcoords
