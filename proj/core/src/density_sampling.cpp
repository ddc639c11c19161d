#include "circcoords/density_sampling.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "circcoords/errors.hpp"
#include "circcoords/random.hpp"

namespace circcoords {

double AcceptanceField::expected_size() const {
  return std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
}

double scott_bandwidth(const PointCloud& cloud, int intrinsic_dim) {
  if (intrinsic_dim < 1) throw std::invalid_argument("scott_bandwidth: intrinsic_dim must be >= 1");
  const std::size_t n = cloud.size();
  const std::size_t dim = cloud.dim();
  if (n < 2) throw std::invalid_argument("scott_bandwidth: need at least two points");

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
      cloud.data().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& eig = solver.eigenvalues();
  const double largest = eig.maxCoeff();
  if (!(largest > 0.0)) throw ZeroVarianceError("scott_bandwidth: sample covariance is zero");

  // Eigenvalues at round-off level of the largest are treated as zero.
  const double cutoff = largest * 1e-12;
  double log_sum = 0.0;
  int positive = 0;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (eig[i] > cutoff) {
      log_sum += std::log(eig[i]);
      ++positive;
    }
  }
  const double sigma = std::exp(0.5 * log_sum / positive);
  return sigma * std::pow(static_cast<double>(n), -1.0 / (intrinsic_dim + 4.0));
}

DensityField estimate_density(const PointCloud& cloud, double bandwidth) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("estimate_density: bandwidth must be positive");
  const std::size_t n = cloud.size();
  std::vector<double> counts(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // Closed ball, compared on distances so the boundary agrees with the Rips edge test.
      if (cloud.distance(i, j) <= bandwidth) {
        counts[i] += 1.0;
        counts[j] += 1.0;
      }
    }
  }
  return {std::move(counts), bandwidth};
}

AcceptanceField make_acceptance(const DensityField& density, double target_size) {
  const auto& rho = density.values;
  if (rho.empty()) throw std::invalid_argument("make_acceptance: empty density");
  if (!(target_size > 0.0)) throw std::invalid_argument("make_acceptance: target_size must be positive");
  if (target_size > static_cast<double>(rho.size()))
    throw std::invalid_argument("make_acceptance: target_size exceeds the point count");

  double min_rho = rho.front();
  double inv_sum = 0.0;
  for (double r : rho) {
    if (!(r > 0.0)) throw std::invalid_argument("make_acceptance: density values must be positive");
    min_rho = std::min(min_rho, r);
    inv_sum += 1.0 / r;
  }
  const double m = std::min(min_rho, target_size / inv_sum);

  AcceptanceField field;
  field.floor_constant = m;
  field.probabilities.reserve(rho.size());
  for (double r : rho) field.probabilities.push_back(std::min(1.0, m / r));
  return field;
}

SubsampleSet rejection_sample(const PointCloud& cloud, const AcceptanceField& acceptance,
                              std::size_t k, std::uint64_t seed) {
  const auto& p = acceptance.probabilities;
  if (p.size() != cloud.size())
    throw std::invalid_argument("rejection_sample: acceptance length does not match the cloud");
  if (k == 0) throw std::invalid_argument("rejection_sample: k must be positive");

  SubsampleSet set;
  set.seed = seed;
  set.subsamples.resize(k);
  set.undersized.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto& sub = set.subsamples[i];
    for (std::size_t z = 0; z < p.size(); ++z) {
      if (keyed_uniform(seed, i, z) <= p[z]) sub.push_back(z);
    }
    set.undersized[i] = sub.size() < SubsampleSet::kMinViableSize;
  }
  return set;
}

}  // namespace circcoords
