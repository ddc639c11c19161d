#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace circcoords {

/// n ordered points on the circle.
using Configuration = std::vector<double>;

/// Element of O(2) acting on angles: θ ↦ rotation ± θ.
struct O2Element {
  bool reflect = false;
  double rotation = 0.0;

  double apply(double theta) const;
  /// 2x2 matrix acting on row vectors (cos θ, sin θ), row-major.
  void to_matrix(double m[4]) const;
  static O2Element from_matrix(const double m[4]);
};

struct ProcrustesSeed {
  std::vector<O2Element> transforms;
  Configuration centroid;
  /// Per point: set when the planar centroid vanished and configuration 0 was used.
  std::vector<std::uint8_t> tie;
  double planar_loss = 0.0;
  std::size_t sweeps = 0;
};

struct HillClimbOptions {
  double rate0 = 0.1;
  double tol = 1e-8;
  std::size_t max_iter = 1000;
};

struct AlignmentResult {
  std::vector<O2Element> transforms;
  Configuration centroid;
  std::vector<std::uint8_t> tie;
  /// Seed loss followed by the loss after each accepted iteration.
  std::vector<double> loss_trace;
  bool converged = false;

  double final_loss() const { return loss_trace.empty() ? 0.0 : loss_trace.back(); }
  std::size_t iterations() const { return loss_trace.empty() ? 0 : loss_trace.size() - 1; }
};

/// (1/k) Σ_i Σ_j d(g_i Φ_i(j), Θ(j))^2 with d the arc-length distance.
double circle_loss(std::span<const O2Element> transforms, const Configuration& centroid,
                   std::span<const Configuration> configs);

/// Generalized orthogonal Procrustes in the plane (ten Berge), started from
/// identity transforms, followed by radial projection of the centroid.
ProcrustesSeed procrustes_o2_seed(std::span<const Configuration> configs, double tol = 1e-10,
                                  std::size_t max_sweeps = 10000);

/// Coordinate-wise descent on the circle loss with step rate0 / (1 + t).
/// Reflection bits stay at their seed values.
AlignmentResult hill_climb(const ProcrustesSeed& seed, std::span<const Configuration> configs,
                           const HillClimbOptions& options = {});

/// Seed then hill climb; the centroid of the result is the averaged coordinate.
AlignmentResult align_and_average(std::span<const Configuration> configs,
                                  const HillClimbOptions& options = {});

}  // namespace circcoords
