#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "circcoords/persistence.hpp"
#include "circcoords/point_cloud.hpp"

namespace circcoords {

/// Bit flags attached to individual points of a coordinate.
enum CoordinateFlag : std::uint8_t {
  kFlagIsolated = 1,             // vertex without edges; angle fixed at 0
  kFlagDegenerateExtension = 2,  // circular mean had no direction; nearest angle used
  kFlagCentroidTie = 4,          // planar centroid at the origin during alignment
};

/// alpha_tilde = alpha + delta f, the least-squares representative of [alpha].
struct HarmonicRepresentative {
  std::vector<double> potential;
  std::vector<Edge> edges;
  /// Smoothed value per edge, same order as `edges`.
  std::vector<double> smoothed;
  double energy = 0.0;
  std::vector<bool> isolated;
  std::size_t iterations = 0;
  double residual = 0.0;
};

struct CircularCoordinate {
  /// Angles in [0, 2π), one per domain entry.
  std::vector<double> angles;
  /// Strictly increasing indices into the parent cloud.
  std::vector<std::size_t> domain;
  std::vector<std::uint8_t> flags;

  std::size_t size() const noexcept { return angles.size(); }
};

struct SolverOptions {
  double tolerance = 1e-9;
  /// 0 means 10 * vertex_count.
  std::size_t max_iterations = 0;
};

/// Minimizes sum_e (alpha(e) + f(v) - f(u))^2 over f with conjugate gradients
/// on the graph Laplacian, started at zero. Throws SolverFailure when the
/// iteration cap is hit.
HarmonicRepresentative harmonic_smooth(const IntegerCocycle& cocycle, std::span<const Edge> graph,
                                       std::size_t vertex_count, const SolverOptions& options = {});

/// angle = 2π f mod 2π. An empty domain means 0..n-1.
CircularCoordinate to_circle(const HarmonicRepresentative& rep,
                             std::span<const std::size_t> domain = {});

/// Extends a subsample coordinate to every point of `cloud` by the circular mean
/// weighted with exp(-kernel_rate |x - y|^2). Throws EmptyDomainError on an empty
/// coordinate.
CircularCoordinate extend_coordinate(const CircularCoordinate& coord, const PointCloud& cloud,
                                     double kernel_rate);

}  // namespace circcoords
