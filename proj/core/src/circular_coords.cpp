#include "circcoords/circular_coords.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "circcoords/circle.hpp"
#include "circcoords/errors.hpp"

namespace circcoords {

namespace {

std::uint64_t edge_key(std::uint32_t u, std::uint32_t v) {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

}  // namespace

HarmonicRepresentative harmonic_smooth(const IntegerCocycle& cocycle, std::span<const Edge> graph,
                                       std::size_t vertex_count, const SolverOptions& options) {
  const std::size_t n = vertex_count;
  if (n == 0) throw std::invalid_argument("harmonic_smooth: no vertices");

  std::unordered_map<std::uint64_t, std::size_t> position;
  position.reserve(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const Edge& e = graph[i];
    if (e.u >= e.v || e.v >= n) throw std::invalid_argument("harmonic_smooth: malformed edge");
    position.emplace(edge_key(e.u, e.v), i);
  }
  std::vector<double> alpha(graph.size(), 0.0);
  for (const auto& entry : cocycle.values) {
    auto it = position.find(edge_key(entry.u, entry.v));
    if (it == position.end())
      throw std::invalid_argument("harmonic_smooth: cocycle edge missing from the graph");
    alpha[it->second] = static_cast<double>(entry.value);
  }

  // Normal equations L f = -B^T alpha with (B f)(u, v) = f(v) - f(u).
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * graph.size());
  std::vector<std::size_t> degree(n, 0);
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const auto u = static_cast<Eigen::Index>(graph[i].u);
    const auto v = static_cast<Eigen::Index>(graph[i].v);
    rhs[v] -= alpha[i];
    rhs[u] += alpha[i];
    triplets.emplace_back(u, u, 1.0);
    triplets.emplace_back(v, v, 1.0);
    triplets.emplace_back(u, v, -1.0);
    triplets.emplace_back(v, u, -1.0);
    ++degree[graph[i].u];
    ++degree[graph[i].v];
  }
  Eigen::SparseMatrix<double> laplacian(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  laplacian.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::IdentityPreconditioner>
      cg;
  cg.setTolerance(options.tolerance);
  const std::size_t cap = options.max_iterations == 0 ? 10 * n : options.max_iterations;
  cg.setMaxIterations(static_cast<Eigen::Index>(cap));
  cg.compute(laplacian);
  Eigen::VectorXd f = cg.solveWithGuess(rhs, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
  if (cg.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "conjugate gradients did not reach relative residual " << options.tolerance
        << " within " << cap << " iterations (residual " << cg.error() << ")";
    throw SolverFailure(msg.str(), cg.error());
  }

  HarmonicRepresentative rep;
  rep.potential.assign(f.data(), f.data() + n);
  rep.edges.assign(graph.begin(), graph.end());
  rep.smoothed.resize(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const double value = alpha[i] + rep.potential[graph[i].v] - rep.potential[graph[i].u];
    rep.smoothed[i] = value;
    rep.energy += value * value;
  }
  rep.isolated.resize(n);
  for (std::size_t i = 0; i < n; ++i) rep.isolated[i] = degree[i] == 0;
  rep.iterations = static_cast<std::size_t>(cg.iterations());
  rep.residual = cg.error();
  return rep;
}

CircularCoordinate to_circle(const HarmonicRepresentative& rep, std::span<const std::size_t> domain) {
  const std::size_t n = rep.potential.size();
  CircularCoordinate coord;
  if (domain.empty()) {
    coord.domain.resize(n);
    for (std::size_t i = 0; i < n; ++i) coord.domain[i] = i;
  } else {
    if (domain.size() != n) throw std::invalid_argument("to_circle: domain size mismatch");
    coord.domain.assign(domain.begin(), domain.end());
  }
  coord.angles.resize(n);
  coord.flags.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const bool isolated = i < rep.isolated.size() && rep.isolated[i];
    if (isolated) {
      coord.angles[i] = 0.0;
      coord.flags[i] |= kFlagIsolated;
    } else {
      coord.angles[i] = wrap_angle(kTwoPi * rep.potential[i]);
    }
  }
  return coord;
}

CircularCoordinate extend_coordinate(const CircularCoordinate& coord, const PointCloud& cloud,
                                     double kernel_rate) {
  if (coord.angles.empty()) throw EmptyDomainError("extend_coordinate: empty subsample coordinate");
  if (!(kernel_rate > 0.0)) throw std::invalid_argument("extend_coordinate: kernel_rate must be positive");
  if (coord.domain.size() != coord.angles.size())
    throw std::invalid_argument("extend_coordinate: domain and angles differ in length");

  const std::size_t n = cloud.size();
  const std::size_t m = coord.domain.size();
  std::vector<std::ptrdiff_t> slot(n, -1);
  for (std::size_t s = 0; s < m; ++s) {
    if (coord.domain[s] >= n) throw std::invalid_argument("extend_coordinate: domain index out of range");
    slot[coord.domain[s]] = static_cast<std::ptrdiff_t>(s);
  }
  std::vector<double> cosines(m);
  std::vector<double> sines(m);
  for (std::size_t s = 0; s < m; ++s) {
    cosines[s] = std::cos(coord.angles[s]);
    sines[s] = std::sin(coord.angles[s]);
  }

  CircularCoordinate out;
  out.domain.resize(n);
  out.angles.resize(n);
  out.flags.assign(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    out.domain[x] = x;
    if (slot[x] >= 0) {
      const auto s = static_cast<std::size_t>(slot[x]);
      out.angles[x] = coord.angles[s];
      out.flags[x] = s < coord.flags.size() ? coord.flags[s] : 0;
      continue;
    }
    double cx = 0.0;
    double sx = 0.0;
    double nearest = std::numeric_limits<double>::infinity();
    std::size_t nearest_slot = 0;
    for (std::size_t s = 0; s < m; ++s) {
      const double d2 = cloud.squared_distance(x, coord.domain[s]);
      const double w = std::exp(-kernel_rate * d2);
      cx += w * cosines[s];
      sx += w * sines[s];
      if (d2 < nearest) {
        nearest = d2;
        nearest_slot = s;
      }
    }
    if (std::hypot(cx, sx) < 1e-8) {
      out.angles[x] = coord.angles[nearest_slot];
      out.flags[x] |= kFlagDegenerateExtension;
    } else {
      out.angles[x] = wrap_angle(std::atan2(sx, cx));
    }
  }
  return out;
}

}  // namespace circcoords
