#pragma once

// Independent reference implementations used only by the tests. They favor
// directness over speed: dense matrices, exhaustive enumeration, grid search.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include "circcoords/circle.hpp"
#include "circcoords/persistence.hpp"
#include "circcoords/point_cloud.hpp"

namespace oracle {

struct Simplex {
  std::vector<std::uint32_t> vertices;
  double value = 0.0;
};

inline double simplex_value(const circcoords::PointCloud& cloud, const std::vector<std::uint32_t>& v) {
  double value = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) value = std::max(value, cloud.distance(v[i], v[j]));
  return value;
}

/// Every simplex of dimension <= 2 of the Rips complex, ordered by
/// (value, dimension, vertices).
inline std::vector<Simplex> rips_simplices(const circcoords::PointCloud& cloud, double max_scale) {
  const auto n = static_cast<std::uint32_t>(cloud.size());
  std::vector<Simplex> out;
  for (std::uint32_t a = 0; a < n; ++a) out.push_back({{a}, 0.0});
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b) {
      const double v = simplex_value(cloud, {a, b});
      if (v <= max_scale) out.push_back({{a, b}, v});
    }
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b)
      for (std::uint32_t c = b + 1; c < n; ++c) {
        const double v = simplex_value(cloud, {a, b, c});
        if (v <= max_scale) out.push_back({{a, b, c}, v});
      }
  std::stable_sort(out.begin(), out.end(), [](const Simplex& x, const Simplex& y) {
    return std::make_tuple(x.value, x.vertices.size(), x.vertices) <
           std::make_tuple(y.value, y.vertices.size(), y.vertices);
  });
  return out;
}

/// Dimension-1 persistent homology by textbook reduction of the full boundary
/// matrix over Z/p. Returns (birth, death) pairs with birth < death, sorted;
/// essential classes get death = +inf.
inline std::vector<std::pair<double, double>> h1_bars(const circcoords::PointCloud& cloud, double max_scale,
                                                      std::uint32_t p) {
  const auto simplices = rips_simplices(cloud, max_scale);
  const std::size_t m = simplices.size();
  std::map<std::vector<std::uint32_t>, std::size_t> index;
  for (std::size_t i = 0; i < m; ++i) index[simplices[i].vertices] = i;

  // Columns as dense vectors mod p.
  std::vector<std::vector<std::int64_t>> columns(m, std::vector<std::int64_t>(m, 0));
  for (std::size_t j = 0; j < m; ++j) {
    const auto& v = simplices[j].vertices;
    if (v.size() < 2) continue;
    for (std::size_t drop = 0; drop < v.size(); ++drop) {
      std::vector<std::uint32_t> face;
      for (std::size_t r = 0; r < v.size(); ++r)
        if (r != drop) face.push_back(v[r]);
      const std::int64_t sign = drop % 2 == 0 ? 1 : static_cast<std::int64_t>(p) - 1;
      columns[j][index.at(face)] = sign;
    }
  }
  auto low = [&](std::size_t j) -> std::ptrdiff_t {
    for (std::size_t i = m; i-- > 0;)
      if (columns[j][i] != 0) return static_cast<std::ptrdiff_t>(i);
    return -1;
  };
  auto inverse = [p](std::int64_t a) {
    std::int64_t result = 1, base = a % p, e = p - 2;
    while (e > 0) {
      if (e & 1) result = result * base % p;
      base = base * base % p;
      e >>= 1;
    }
    return result;
  };

  std::vector<std::ptrdiff_t> lows(m, -1);
  std::map<std::ptrdiff_t, std::size_t> owner;
  for (std::size_t j = 0; j < m; ++j) {
    std::ptrdiff_t l = low(j);
    while (l >= 0 && owner.count(l)) {
      const std::size_t k = owner[l];
      const std::int64_t factor =
          (p - columns[j][l] * inverse(columns[k][l]) % p) % p;
      for (std::size_t i = 0; i < m; ++i) columns[j][i] = (columns[j][i] + factor * columns[k][i]) % p;
      l = low(j);
    }
    lows[j] = l;
    if (l >= 0) owner[l] = j;
  }

  std::vector<std::pair<double, double>> bars;
  std::vector<bool> paired(m, false);
  for (std::size_t j = 0; j < m; ++j) {
    if (lows[j] < 0) continue;
    const auto i = static_cast<std::size_t>(lows[j]);
    paired[i] = true;
    if (simplices[i].vertices.size() == 2 && simplices[i].value < simplices[j].value)
      bars.emplace_back(simplices[i].value, simplices[j].value);
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (simplices[i].vertices.size() == 2 && lows[i] < 0 && !paired[i])
      bars.emplace_back(simplices[i].value, std::numeric_limits<double>::infinity());
  }
  std::sort(bars.begin(), bars.end());
  return bars;
}

/// alpha + B f with f the minimum-norm least-squares solution, via a dense
/// complete orthogonal decomposition.
struct DenseHarmonic {
  Eigen::VectorXd potential;
  Eigen::VectorXd smoothed;
};

inline DenseHarmonic dense_harmonic(const std::vector<circcoords::Edge>& edges, const std::vector<double>& alpha,
                                    std::size_t n) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(edges.size()), static_cast<Eigen::Index>(n));
  Eigen::VectorXd a(static_cast<Eigen::Index>(edges.size()));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    b(static_cast<Eigen::Index>(e), edges[e].v) = 1.0;
    b(static_cast<Eigen::Index>(e), edges[e].u) = -1.0;
    a[static_cast<Eigen::Index>(e)] = alpha[e];
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(b);
  DenseHarmonic out;
  out.potential = cod.solve(-a);
  out.smoothed = a + b * out.potential;
  return out;
}

/// Arc-length RMS after the best rotation/reflection found on a uniform grid.
inline double grid_rmse(const std::vector<double>& coord, const std::vector<double>& truth, std::size_t steps) {
  double best = std::numeric_limits<double>::infinity();
  for (int reflect = 0; reflect < 2; ++reflect) {
    for (std::size_t s = 0; s < steps; ++s) {
      const double rot = circcoords::kTwoPi * static_cast<double>(s) / static_cast<double>(steps);
      double total = 0.0;
      for (std::size_t i = 0; i < coord.size(); ++i) {
        const double d = circcoords::circle_distance(rot + (reflect ? -coord[i] : coord[i]), truth[i]);
        total += d * d;
      }
      best = std::min(best, std::sqrt(total / static_cast<double>(coord.size())));
    }
  }
  return best;
}

/// Coboundary of a mod-p cochain on one triangle.
inline std::uint32_t coboundary_mod_p(const std::vector<circcoords::CochainEntry>& cochain,
                                      const circcoords::Triangle& t, std::uint32_t p) {
  auto value = [&](std::uint32_t u, std::uint32_t v) -> std::int64_t {
    for (const auto& e : cochain)
      if (e.u == u && e.v == v) return e.value;
    return 0;
  };
  const std::int64_t d = value(t.b, t.c) - value(t.a, t.c) + value(t.a, t.b);
  return static_cast<std::uint32_t>(((d % p) + p) % p);
}

inline circcoords::PointCloud random_cloud(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> flat(n * dim);
  for (double& x : flat) x = unit(rng);
  return circcoords::PointCloud(dim, std::move(flat));
}

inline std::vector<double> random_angles(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, circcoords::kTwoPi);
  std::vector<double> out(n);
  for (double& a : out) a = unit(rng);
  return out;
}

}  // namespace oracle
