#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "circcoords/point_cloud.hpp"

namespace circcoords {

struct SyntheticSample {
  PointCloud cloud;
  /// True angle, or normalized arc length for the ellipse, in [0, 2π).
  std::vector<double> true_parameter;
  std::map<std::string, double> generator_params;
  std::uint64_t seed = 0;
};

/// T x N samples, row-major (rows are time points).
class TimeSeries {
 public:
  TimeSeries(std::size_t channels, std::vector<double> flat, double rate = 1.0);

  std::size_t length() const noexcept { return length_; }
  std::size_t channels() const noexcept { return channels_; }
  double rate() const noexcept { return rate_; }
  double operator()(std::size_t t, std::size_t c) const noexcept { return data_[t * channels_ + c]; }
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  std::size_t channels_;
  std::size_t length_;
  std::vector<double> data_;
  double rate_;
};

/// Best-Fisher rejection sampler for the von Mises law with mean mu and
/// concentration kappa; kappa == 0 is uniform. Returns an angle in [0, 2π).
double sample_von_mises(std::mt19937_64& rng, double mu, double kappa);

struct CircleParams {
  std::size_t n = 1000;
  double dispersion = 1.3;
  double radius_mean = 1.0;
  double radius_sd = 0.1;
};

SyntheticSample gen_unbalanced_circle(const CircleParams& params, std::uint64_t seed);

/// Circle sample with x scaled by `dilation`; the true parameter is
/// 2π times the fraction of the ideal ellipse perimeter from angle 0.
SyntheticSample gen_unbalanced_ellipse(const CircleParams& params, double dilation,
                                       std::uint64_t seed);

/// Normalized arc length 2π s(θ)/P on the ellipse (a cos t, sin t).
double ellipse_arc_parameter(double theta, double a);

struct LimitCycleParams {
  std::size_t length = 960;
  double rate = 4.0;
  /// Mean period in frames.
  double period = 160.0;
  /// Relative speed modulation; the phase lingers near π when positive.
  double speed_modulation = 0.6;
  double noise_sd = 0.1;
  double drift = 1.0;
};

struct LimitCycleSeries {
  TimeSeries series;
  /// Phase of the oscillator at each frame, in [0, 2π).
  std::vector<double> phase;
};

/// Two-channel noisy oscillator with non-uniform phase speed and slow linear
/// drift, standing in for a pair of neuron traces.
LimitCycleSeries gen_limit_cycle_series(const LimitCycleParams& params, std::uint64_t seed);

/// Per column: subtract the moving mean and divide by the moving standard
/// deviation (floored at 1e-8). Each window holds `window` frames centered on t,
/// shifted inward near the ends.
TimeSeries detrend(const TimeSeries& ts, std::size_t window);

/// Row t is (f(t), f(t + tau), ..., f(t + d tau)).
PointCloud delay_embed(const TimeSeries& ts, std::size_t d, std::size_t tau);

struct PcaResult {
  PointCloud cloud;
  /// Variance along each retained direction, non-increasing.
  std::vector<double> explained_variance;
  bool rank_deficient = false;
};

/// Projection of the centered cloud onto the top principal directions; each
/// direction's largest-magnitude entry is made positive. Directions beyond the
/// rank are zero-filled and flagged.
PcaResult pca_reduce(const PointCloud& cloud, std::size_t out_dim);

}  // namespace circcoords
