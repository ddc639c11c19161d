#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "circcoords/point_cloud.hpp"

namespace circcoords {

/// ψ(x) for x > 0.
double digamma(double x);

/// A finite sample with a metric: Euclidean points or angles under arc length.
class MetricSample {
 public:
  static MetricSample euclidean(const PointCloud& cloud);
  static MetricSample circular(std::vector<double> angles);

  std::size_t size() const noexcept { return size_; }
  double distance(std::size_t i, std::size_t j) const noexcept;

 private:
  MetricSample() = default;
  std::size_t size_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
  bool circular_ = false;
};

struct MIEstimate {
  double value = 0.0;
  /// ψ(N) - ψ(k) - 1/k.
  double maximum = 0.0;
  double normalized = 0.0;
  int k_neighbors = 0;
  std::size_t sample_count = 0;
  /// Magnitude of the index-keyed jitter added to distances before counting.
  double tie_jitter = 0.0;
};

inline constexpr double kKsgTieJitter = 1e-12;

/// Kraskov-Stögbauer-Grassberger estimator (second form) under the max of the
/// two marginal metrics, counting with closed balls after tie jitter.
MIEstimate ksg_mi(const MetricSample& xs, const MetricSample& ys, int k);

/// min over O(2) of the RMS arc-length distance, with the rotation for each
/// reflection bit set to the circular mean of the residuals.
double circular_rmse_aligned(std::span<const double> coord, std::span<const double> truth);

/// Signed number of turns along a closed path (first index == last index).
long winding_number(std::span<const double> angles, std::span<const std::size_t> path);

/// Closed path visiting the points in increasing order of `parameter`.
std::vector<std::size_t> ordering_path(std::span<const double> parameter);

struct PairedTTest {
  double mean_difference = 0.0;
  double t_statistic = 0.0;
  /// One-sided p-value for mean(a - b) > 0.
  double p_value = 1.0;
  std::size_t degrees_of_freedom = 0;
};

PairedTTest paired_t_test_greater(std::span<const double> a, std::span<const double> b);

struct ChiSquareTest {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t bins = 0;
};

/// Goodness of fit of angles in [0, 2π) to the uniform law on equal bins.
ChiSquareTest chi_square_uniform(std::span<const double> angles, std::size_t bins = 12);

}  // namespace circcoords
