#include "circcoords/alignment.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "circcoords/circle.hpp"

namespace circcoords {

namespace {

void check_shapes(std::span<const Configuration> configs, std::size_t n) {
  for (const auto& c : configs) {
    if (c.size() != n) throw std::invalid_argument("alignment: configurations differ in length");
  }
}

// Both arguments in [0, 2π).
inline double arc2(double a, double b) {
  double d = std::fabs(a - b);
  if (d > kPi) d = kTwoPi - d;
  return d * d;
}

}  // namespace

double O2Element::apply(double theta) const {
  return wrap_angle(reflect ? rotation - theta : rotation + theta);
}

void O2Element::to_matrix(double m[4]) const {
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  if (reflect) {
    m[0] = c, m[1] = s, m[2] = s, m[3] = -c;
  } else {
    m[0] = c, m[1] = s, m[2] = -s, m[3] = c;
  }
}

O2Element O2Element::from_matrix(const double m[4]) {
  O2Element g;
  g.reflect = m[0] * m[3] - m[1] * m[2] < 0.0;
  g.rotation = wrap_angle(std::atan2(m[1], m[0]));
  return g;
}

double circle_loss(std::span<const O2Element> transforms, const Configuration& centroid,
                   std::span<const Configuration> configs) {
  if (transforms.size() != configs.size())
    throw std::invalid_argument("circle_loss: one transform per configuration required");
  if (configs.empty()) throw std::invalid_argument("circle_loss: no configurations");
  check_shapes(configs, centroid.size());
  double total = 0.0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    for (std::size_t j = 0; j < centroid.size(); ++j) {
      const double d = circle_distance(transforms[i].apply(configs[i][j]), centroid[j]);
      total += d * d;
    }
  }
  return total / static_cast<double>(configs.size());
}

ProcrustesSeed procrustes_o2_seed(std::span<const Configuration> configs, double tol,
                                  std::size_t max_sweeps) {
  const std::size_t k = configs.size();
  if (k < 2) throw std::invalid_argument("procrustes_o2_seed: need at least two configurations");
  const std::size_t n = configs[0].size();
  check_shapes(configs, n);
  const auto rows = static_cast<Eigen::Index>(n);

  std::vector<Eigen::MatrixX2d> x(k, Eigen::MatrixX2d(rows, 2));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      x[i](static_cast<Eigen::Index>(j), 0) = std::cos(configs[i][j]);
      x[i](static_cast<Eigen::Index>(j), 1) = std::sin(configs[i][j]);
    }
  }
  std::vector<Eigen::Matrix2d> q(k, Eigen::Matrix2d::Identity());
  std::vector<Eigen::MatrixX2d> moved = x;
  Eigen::MatrixX2d sum = Eigen::MatrixX2d::Zero(rows, 2);
  for (const auto& m : moved) sum += m;

  auto planar_loss = [&]() {
    const Eigen::MatrixX2d mean = sum / static_cast<double>(k);
    double total = 0.0;
    for (const auto& m : moved) total += (m - mean).squaredNorm();
    return total / static_cast<double>(k);
  };

  ProcrustesSeed seed;
  double previous = planar_loss();
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < k; ++i) {
      const Eigen::MatrixX2d others = sum - moved[i];
      const Eigen::Matrix2d cross = x[i].transpose() * others;
      Eigen::JacobiSVD<Eigen::Matrix2d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
      q[i] = svd.matrixU() * svd.matrixV().transpose();
      sum -= moved[i];
      moved[i] = x[i] * q[i];
      sum += moved[i];
    }
    seed.sweeps = sweep + 1;
    const double current = planar_loss();
    const bool done = std::fabs(previous - current) < tol;
    previous = current;
    if (done) break;
  }
  seed.planar_loss = previous;

  seed.transforms.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double m[4] = {q[i](0, 0), q[i](0, 1), q[i](1, 0), q[i](1, 1)};
    seed.transforms[i] = O2Element::from_matrix(m);
  }
  seed.centroid.resize(n);
  seed.tie.assign(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto r = static_cast<Eigen::Index>(j);
    const double cx = sum(r, 0) / static_cast<double>(k);
    const double cy = sum(r, 1) / static_cast<double>(k);
    if (std::hypot(cx, cy) < 1e-8) {
      seed.centroid[j] = seed.transforms[0].apply(configs[0][j]);
      seed.tie[j] = 1;
    } else {
      seed.centroid[j] = wrap_angle(std::atan2(cy, cx));
    }
  }
  return seed;
}

AlignmentResult hill_climb(const ProcrustesSeed& seed, std::span<const Configuration> configs,
                           const HillClimbOptions& options) {
  const std::size_t k = configs.size();
  if (k == 0 || seed.transforms.size() != k)
    throw std::invalid_argument("hill_climb: seed does not match the configurations");
  const std::size_t n = seed.centroid.size();
  check_shapes(configs, n);
  if (!(options.rate0 > 0.0)) throw std::invalid_argument("hill_climb: rate0 must be positive");

  AlignmentResult result;
  result.transforms = seed.transforms;
  result.centroid = seed.centroid;
  result.tie = seed.tie.empty() ? std::vector<std::uint8_t>(n, 0) : seed.tie;
  for (auto& g : result.transforms) g.rotation = wrap_angle(g.rotation);
  for (auto& theta : result.centroid) theta = wrap_angle(theta);

  // sign[i] * Φ_i(j): the transformed angle is rotation + signed[i][j].
  std::vector<std::vector<double>> signed_angles(k, std::vector<double>(n));
  for (std::size_t i = 0; i < k; ++i) {
    const double s = result.transforms[i].reflect ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) signed_angles[i][j] = s * configs[i][j];
  }
  auto transformed = [&](std::size_t i, std::size_t j, double rotation) {
    return wrap_angle(rotation + signed_angles[i][j]);
  };

  double loss = circle_loss(result.transforms, result.centroid, configs);
  result.loss_trace.push_back(loss);

  // Ties within rounding are not moves, so the step size keeps shrinking.
  auto improves = [](double candidate, double incumbent) {
    return candidate < incumbent - 1e-12 * (1.0 + incumbent);
  };
  bool stalled = false;
  for (std::size_t t = 0; t < options.max_iter; ++t) {
    const double eta = options.rate0 / (1.0 + static_cast<double>(t));
    const double steps[3] = {0.0, eta, -eta};
    const auto previous_transforms = result.transforms;
    const auto previous_centroid = result.centroid;
    bool moved = false;

    for (std::size_t i = 0; i < k; ++i) {
      double best = 0.0;
      std::size_t choice = 0;
      for (std::size_t c = 0; c < 3; ++c) {
        const double rotation = wrap_angle(result.transforms[i].rotation + steps[c]);
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) total += arc2(transformed(i, j, rotation), result.centroid[j]);
        if (c == 0 || improves(total, best)) {
          best = total;
          choice = c;
        }
      }
      if (choice != 0) {
        result.transforms[i].rotation = wrap_angle(result.transforms[i].rotation + steps[choice]);
        moved = true;
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      double best = 0.0;
      std::size_t choice = 0;
      for (std::size_t c = 0; c < 3; ++c) {
        const double theta = wrap_angle(result.centroid[j] + steps[c]);
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i)
          total += arc2(transformed(i, j, result.transforms[i].rotation), theta);
        if (c == 0 || improves(total, best)) {
          best = total;
          choice = c;
        }
      }
      if (choice != 0) {
        result.centroid[j] = wrap_angle(result.centroid[j] + steps[choice]);
        moved = true;
      }
    }

    if (!moved) {
      // Nothing improves at this step size; a smaller one may.
      stalled = true;
      continue;
    }
    stalled = false;
    const double current = circle_loss(result.transforms, result.centroid, configs);
    if (current > loss) {
      // Each move lowered its partial sum; a higher total is rounding noise.
      result.transforms = previous_transforms;
      result.centroid = previous_centroid;
      result.converged = true;
      break;
    }
    result.loss_trace.push_back(current);
    const double decrease = loss - current;
    loss = current;
    if (decrease < options.tol) {
      result.converged = true;
      break;
    }
  }
  // Reaching the cap without any improving move left is a local optimum.
  if (stalled) result.converged = true;
  return result;
}

AlignmentResult align_and_average(std::span<const Configuration> configs,
                                  const HillClimbOptions& options) {
  const ProcrustesSeed seed = procrustes_o2_seed(configs);
  return hill_climb(seed, configs, options);
}

}  // namespace circcoords
