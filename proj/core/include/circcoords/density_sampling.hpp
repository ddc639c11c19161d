#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "circcoords/point_cloud.hpp"

namespace circcoords {

/// Ball-count density estimate: values[i] = #{x : |x - x_i| <= bandwidth}.
struct DensityField {
  std::vector<double> values;
  double bandwidth = 0.0;
};

/// Per-point acceptance probabilities m / density[i].
struct AcceptanceField {
  std::vector<double> probabilities;
  double floor_constant = 0.0;

  double expected_size() const;
};

struct SubsampleSet {
  /// Sorted index lists into the parent cloud.
  std::vector<std::vector<std::size_t>> subsamples;
  std::uint64_t seed = 0;
  /// Subsamples with fewer than kMinViableSize points.
  std::vector<bool> undersized;

  static constexpr std::size_t kMinViableSize = 4;

  std::size_t count() const noexcept { return subsamples.size(); }
};

/// Multivariate Scott's rule: sigma * n^(-1/(d+4)), where sigma^2 is the geometric
/// mean of the positive eigenvalues of the sample covariance and d the intrinsic
/// dimension. Throws ZeroVarianceError when every eigenvalue vanishes.
double scott_bandwidth(const PointCloud& cloud, int intrinsic_dim);

DensityField estimate_density(const PointCloud& cloud, double bandwidth);

/// Chooses m = min(min density, target / sum(1/density)) so the expected subsample
/// size equals target_size whenever that is feasible.
AcceptanceField make_acceptance(const DensityField& density, double target_size);

/// Draws k subsamples; point z enters subsample i iff tau(seed, i, z) <= p(z).
SubsampleSet rejection_sample(const PointCloud& cloud, const AcceptanceField& acceptance,
                              std::size_t k, std::uint64_t seed);

}  // namespace circcoords
