#include "circcoords/data_prep.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>

#include "circcoords/circle.hpp"

namespace circcoords {

TimeSeries::TimeSeries(std::size_t channels, std::vector<double> flat, double rate)
    : channels_(channels), length_(0), data_(std::move(flat)), rate_(rate) {
  if (channels_ == 0) throw std::invalid_argument("TimeSeries: no channels");
  if (data_.size() % channels_ != 0)
    throw std::invalid_argument("TimeSeries: data is not a multiple of the channel count");
  length_ = data_.size() / channels_;
  if (length_ < 2) throw std::invalid_argument("TimeSeries: need at least two frames");
  if (!(rate_ > 0.0)) throw std::invalid_argument("TimeSeries: rate must be positive");
  for (double v : data_) {
    if (!std::isfinite(v)) throw std::invalid_argument("TimeSeries: non-finite sample");
  }
}

double sample_von_mises(std::mt19937_64& rng, double mu, double kappa) {
  if (kappa < 0.0) throw std::invalid_argument("sample_von_mises: negative concentration");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (kappa < 1e-8) return wrap_angle(mu + kTwoPi * unit(rng));

  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  double f = 0.0;
  for (;;) {
    const double u1 = unit(rng);
    const double u2 = unit(rng);
    const double z = std::cos(kPi * u1);
    f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0) break;
    if (u2 > 0.0 && std::log(c / u2) + 1.0 - c >= 0.0) break;
  }
  const double u3 = unit(rng);
  const double theta = std::acos(std::clamp(f, -1.0, 1.0));
  return wrap_angle(u3 < 0.5 ? mu - theta : mu + theta);
}

SyntheticSample gen_unbalanced_circle(const CircleParams& params, std::uint64_t seed) {
  if (params.n == 0) throw std::invalid_argument("gen_unbalanced_circle: n must be positive");
  if (params.radius_sd < 0.0) throw std::invalid_argument("gen_unbalanced_circle: negative radius_sd");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> radius(params.radius_mean, params.radius_sd);
  std::vector<double> flat(2 * params.n);
  std::vector<double> angles(params.n);
  for (std::size_t i = 0; i < params.n; ++i) {
    const double theta = sample_von_mises(rng, 0.0, params.dispersion);
    const double r = params.radius_sd == 0.0 ? params.radius_mean : radius(rng);
    angles[i] = theta;
    flat[2 * i] = r * std::cos(theta);
    flat[2 * i + 1] = r * std::sin(theta);
  }
  SyntheticSample sample{PointCloud(2, std::move(flat)), std::move(angles), {}, seed};
  sample.generator_params = {{"n", static_cast<double>(params.n)},
                             {"dispersion", params.dispersion},
                             {"radius_mean", params.radius_mean},
                             {"radius_sd", params.radius_sd}};
  return sample;
}

double ellipse_arc_parameter(double theta, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("ellipse_arc_parameter: axis must be positive");
  auto speed = [a](double t) {
    const double s = std::sin(t);
    const double c = std::cos(t);
    return std::sqrt(a * a * s * s + c * c);
  };
  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double quarter = Quad::integrate(speed, 0.0, kPi / 2, 20, 1e-10);
  const double t = wrap_angle(theta);
  // Whole quarters plus the remainder, by symmetry of the speed.
  const double quarters = std::floor(t / (kPi / 2));
  const double rest = t - quarters * (kPi / 2);
  const double partial = rest > 0.0 ? Quad::integrate(speed, quarters * (kPi / 2), t, 20, 1e-10) : 0.0;
  const double arc = quarters * quarter + partial;
  return wrap_angle(kTwoPi * arc / (4.0 * quarter));
}

SyntheticSample gen_unbalanced_ellipse(const CircleParams& params, double dilation,
                                       std::uint64_t seed) {
  if (!(dilation > 0.0)) throw std::invalid_argument("gen_unbalanced_ellipse: dilation must be positive");
  SyntheticSample circle = gen_unbalanced_circle(params, seed);
  std::vector<double> flat = circle.cloud.data();
  for (std::size_t i = 0; i < params.n; ++i) flat[2 * i] *= dilation;
  std::vector<double> parameter(params.n);
  for (std::size_t i = 0; i < params.n; ++i)
    parameter[i] = dilation == 1.0 ? circle.true_parameter[i]
                                   : ellipse_arc_parameter(circle.true_parameter[i], dilation);
  SyntheticSample sample{PointCloud(2, std::move(flat)), std::move(parameter),
                         std::move(circle.generator_params), seed};
  sample.generator_params["dilation"] = dilation;
  return sample;
}

LimitCycleSeries gen_limit_cycle_series(const LimitCycleParams& params, std::uint64_t seed) {
  if (params.length < 2) throw std::invalid_argument("gen_limit_cycle_series: too short");
  if (!(params.period > 0.0)) throw std::invalid_argument("gen_limit_cycle_series: period must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, params.noise_sd);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double omega = kTwoPi / params.period;
  double phi = kTwoPi * unit(rng);
  std::vector<double> flat(2 * params.length);
  std::vector<double> phase(params.length);
  const double span = static_cast<double>(params.length - 1);
  for (std::size_t t = 0; t < params.length; ++t) {
    phase[t] = wrap_angle(phi);
    const double trend = params.drift * static_cast<double>(t) / span;
    flat[2 * t] = std::cos(phi) + trend + (params.noise_sd > 0.0 ? noise(rng) : 0.0);
    flat[2 * t + 1] = std::sin(phi + 0.8) - 0.5 * trend + (params.noise_sd > 0.0 ? noise(rng) : 0.0);
    phi += omega * (1.0 + params.speed_modulation * std::cos(phi));
  }
  return {TimeSeries(2, std::move(flat), params.rate), std::move(phase)};
}

TimeSeries detrend(const TimeSeries& ts, std::size_t window) {
  const std::size_t len = ts.length();
  const std::size_t ch = ts.channels();
  if (window < 1 || window > len) throw std::invalid_argument("detrend: window must lie in [1, T]");
  std::vector<double> out(len * ch);
  for (std::size_t c = 0; c < ch; ++c) {
    for (std::size_t t = 0; t < len; ++t) {
      const std::size_t half = window / 2;
      const std::size_t start = std::min(t > half ? t - half : 0, len - window);
      const double shift = ts(start, c);
      double mean = 0.0;
      for (std::size_t s = start; s < start + window; ++s) mean += ts(s, c) - shift;
      mean = shift + mean / static_cast<double>(window);
      double var = 0.0;
      for (std::size_t s = start; s < start + window; ++s) var += (ts(s, c) - mean) * (ts(s, c) - mean);
      const double sd = std::sqrt(var / static_cast<double>(window));
      out[t * ch + c] = (ts(t, c) - mean) / std::max(sd, 1e-8);
    }
  }
  return TimeSeries(ch, std::move(out), ts.rate());
}

PointCloud delay_embed(const TimeSeries& ts, std::size_t d, std::size_t tau) {
  if (tau < 1) throw std::invalid_argument("delay_embed: tau must be positive");
  const std::size_t len = ts.length();
  const std::size_t ch = ts.channels();
  if (len <= d * tau) throw std::invalid_argument("delay_embed: series shorter than the embedding window");
  const std::size_t rows = len - d * tau;
  const std::size_t dim = ch * (d + 1);
  std::vector<double> flat(rows * dim);
  for (std::size_t t = 0; t < rows; ++t) {
    for (std::size_t lag = 0; lag <= d; ++lag) {
      for (std::size_t c = 0; c < ch; ++c) flat[t * dim + lag * ch + c] = ts(t + lag * tau, c);
    }
  }
  return PointCloud(dim, std::move(flat));
}

PcaResult pca_reduce(const PointCloud& cloud, std::size_t out_dim) {
  const std::size_t n = cloud.size();
  const std::size_t dim = cloud.dim();
  if (out_dim < 1 || out_dim > dim) throw std::invalid_argument("pca_reduce: out_dim must lie in [1, dim]");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cloud[i][j];
  x.rowwise() -= x.colwise().mean();
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  const Eigen::MatrixXd cov = (x.transpose() * x) / denom;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);

  const Eigen::VectorXd values = eig.eigenvalues();  // ascending
  const double top = std::max(values.maxCoeff(), 0.0);
  const double cutoff = top * 1e-12 * static_cast<double>(dim);

  PcaResult result{PointCloud(1, {0.0}), {}, false};
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(out_dim));
  for (std::size_t r = 0; r < out_dim; ++r) {
    const auto col = static_cast<Eigen::Index>(dim - 1 - r);
    const double lambda = values[col];
    if (!(lambda > cutoff) || top == 0.0) {
      result.rank_deficient = true;
      result.explained_variance.push_back(0.0);
      continue;
    }
    Eigen::VectorXd v = eig.eigenvectors().col(col);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    basis.col(static_cast<Eigen::Index>(r)) = v;
    result.explained_variance.push_back(lambda);
  }
  const Eigen::MatrixXd y = x * basis;
  std::vector<double> flat(n * out_dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < out_dim; ++j) flat[i * out_dim + j] = y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  result.cloud = PointCloud(out_dim, std::move(flat));
  return result;
}

}  // namespace circcoords
