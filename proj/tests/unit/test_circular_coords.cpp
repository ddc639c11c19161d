#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "circcoords/circular_coords.hpp"
#include "oracles.hpp"

using namespace circcoords;

namespace {

std::vector<Edge> cycle_edges(std::uint32_t n) {
  std::vector<Edge> edges;
  for (std::uint32_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  edges.push_back({0, n - 1, 1.0});
  return edges;
}

IntegerCocycle unit_on(std::uint32_t u, std::uint32_t v) {
  IntegerCocycle c;
  c.values = {{u, v, 1}};
  c.scale = 1.0;
  return c;
}

std::vector<double> alpha_on(const std::vector<Edge>& edges, const IntegerCocycle& c) {
  std::vector<double> out(edges.size(), 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e)
    for (const auto& x : c.values)
      if (x.u == edges[e].u && x.v == edges[e].v) out[e] = static_cast<double>(x.value);
  return out;
}

}  // namespace

TEST(HarmonicSmooth, CycleSpreadsUnitEvenly) {
  for (std::uint32_t n : {3u, 10u, 100u}) {
    const auto edges = cycle_edges(n);
    const auto rep = harmonic_smooth(unit_on(0, 1), edges, n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      // Edge (0, n-1) is oriented against the cycle direction.
      const double expect = edges[e].u == 0 && edges[e].v == n - 1 ? -1.0 / n : 1.0 / n;
      EXPECT_NEAR(rep.smoothed[e], expect, 1e-9) << "n=" << n;
    }
    EXPECT_NEAR(rep.energy, 1.0 / n, 1e-9);
  }
}

TEST(HarmonicSmooth, TreeGivesZero) {
  std::vector<Edge> edges{{0, 1, 1}, {1, 2, 1}, {1, 3, 1}, {3, 4, 1}};
  IntegerCocycle c;
  c.values = {{0, 1, 3}, {1, 3, -2}, {3, 4, 5}};
  const auto rep = harmonic_smooth(c, edges, 5);
  for (double x : rep.smoothed) EXPECT_NEAR(x, 0.0, 1e-9);
  EXPECT_NEAR(rep.energy, 0.0, 1e-12);
}

TEST(HarmonicSmooth, SquareWithChordMatchesDenseOracle) {
  std::vector<Edge> edges{{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 1}, {0, 2, 1.4}};
  const auto c = unit_on(0, 1);
  const auto rep = harmonic_smooth(c, edges, 4);
  const auto dense = oracle::dense_harmonic(edges, alpha_on(edges, c), 4);
  for (std::size_t e = 0; e < edges.size(); ++e) EXPECT_NEAR(rep.smoothed[e], dense.smoothed[e], 1e-9);
}

TEST(HarmonicSmooth, SmoothedEqualsAlphaPlusCoboundary) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::uint32_t n = 12;
    std::vector<Edge> edges;
    std::bernoulli_distribution keep(0.35);
    for (std::uint32_t u = 0; u < n; ++u)
      for (std::uint32_t v = u + 1; v < n; ++v)
        if (keep(rng)) edges.push_back({u, v, 1.0});
    if (edges.empty()) continue;
    IntegerCocycle c;
    std::uniform_int_distribution<int> value(-2, 2);
    for (const auto& e : edges)
      if (int x = value(rng); x != 0) c.values.push_back({e.u, e.v, x});
    const auto rep = harmonic_smooth(c, edges, n);
    const auto alpha = alpha_on(edges, c);
    double energy = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      EXPECT_NEAR(rep.smoothed[e], alpha[e] + rep.potential[edges[e].v] - rep.potential[edges[e].u], 1e-12);
      energy += rep.smoothed[e] * rep.smoothed[e];
    }
    EXPECT_NEAR(rep.energy, energy, 1e-9);

    const auto dense = oracle::dense_harmonic(edges, alpha, n);
    for (std::size_t e = 0; e < edges.size(); ++e) EXPECT_NEAR(rep.smoothed[e], dense.smoothed[e], 1e-7);

    // Perturbing the potential never lowers the energy.
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int p = 0; p < 10; ++p) {
      std::vector<double> delta(n);
      double norm = 0.0;
      for (double& d : delta) {
        d = normal(rng);
        norm += d * d;
      }
      norm = std::sqrt(norm);
      double perturbed = 0.0;
      for (std::size_t e = 0; e < edges.size(); ++e) {
        const double x = rep.smoothed[e] + 1e-3 * (delta[edges[e].v] - delta[edges[e].u]) / norm;
        perturbed += x * x;
      }
      EXPECT_GE(perturbed, rep.energy - 1e-9);
    }
  }
}

TEST(HarmonicSmooth, WindingPreservedAroundCycle) {
  for (std::uint32_t n : {4u, 7u, 25u}) {
    const auto edges = cycle_edges(n);
    IntegerCocycle c;
    c.values = {{0, n - 1, 1}};
    const auto rep = harmonic_smooth(c, edges, n);
    double total = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e)
      total += (edges[e].u == 0 && edges[e].v == n - 1) ? -rep.smoothed[e] : rep.smoothed[e];
    EXPECT_NEAR(total, -1.0, 1e-9);
  }
}

TEST(HarmonicSmooth, IsolatedVerticesAreMarked) {
  std::vector<Edge> edges{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}};
  const auto rep = harmonic_smooth(unit_on(0, 1), edges, 5);
  EXPECT_EQ(rep.isolated, (std::vector<bool>{false, false, false, true, true}));
  EXPECT_EQ(rep.potential[3], 0.0);
}

TEST(HarmonicSmooth, CapTooSmallThrows) {
  const auto edges = cycle_edges(100);
  SolverOptions opts;
  opts.max_iterations = 2;
  EXPECT_THROW(harmonic_smooth(unit_on(0, 1), edges, 100, opts), SolverFailure);
}

TEST(ToCircle, Examples) {
  HarmonicRepresentative rep;
  rep.potential = {0.0, 0.25, 0.5, 0.75};
  rep.isolated = {false, false, false, false};
  const auto c = to_circle(rep);
  ASSERT_EQ(c.size(), 4u);
  EXPECT_NEAR(c.angles[0], 0.0, 1e-15);
  EXPECT_NEAR(c.angles[1], kPi / 2, 1e-15);
  EXPECT_NEAR(c.angles[2], kPi, 1e-15);
  EXPECT_NEAR(c.angles[3], 3 * kPi / 2, 1e-15);
  EXPECT_EQ(c.domain, (std::vector<std::size_t>{0, 1, 2, 3}));

  HarmonicRepresentative wrap;
  wrap.potential = {1.25};
  wrap.isolated = {false};
  EXPECT_NEAR(to_circle(wrap).angles[0], kPi / 2, 1e-12);

  HarmonicRepresentative negative;
  negative.potential = {-0.25};
  negative.isolated = {false};
  EXPECT_NEAR(to_circle(negative).angles[0], 3 * kPi / 2, 1e-12);
}

TEST(ToCircle, IsolatedVertexGetsZeroAndFlag) {
  HarmonicRepresentative rep;
  rep.potential = {0.3, 0.4};
  rep.isolated = {false, true};
  const std::vector<std::size_t> domain{5, 9};
  const auto c = to_circle(rep, domain);
  EXPECT_EQ(c.domain, domain);
  EXPECT_EQ(c.angles[1], 0.0);
  EXPECT_TRUE(c.flags[1] & kFlagIsolated);
  EXPECT_FALSE(c.flags[0] & kFlagIsolated);
}

TEST(ToCircle, GaugeShiftRotates) {
  std::mt19937_64 rng(32);
  HarmonicRepresentative rep;
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    rep.potential.push_back(u(rng));
    rep.isolated.push_back(false);
  }
  auto shifted = rep;
  const double c = 0.37;
  for (double& f : shifted.potential) f += c;
  const auto a = to_circle(rep);
  const auto b = to_circle(shifted);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_GE(b.angles[i], 0.0);
    EXPECT_LT(b.angles[i], kTwoPi);
    EXPECT_NEAR(circle_distance(b.angles[i], a.angles[i] + kTwoPi * c), 0.0, 1e-12);
  }
}

TEST(ExtendCoordinate, IdentityOnDomain) {
  std::mt19937_64 rng(33);
  const auto cloud = oracle::random_cloud(rng, 30, 2);
  CircularCoordinate coord;
  coord.domain = {2, 7, 11, 20};
  coord.angles = {0.1, 2.0, 4.0, 5.5};
  coord.flags.assign(4, 0);
  const auto full = extend_coordinate(coord, cloud, 3.0);
  ASSERT_EQ(full.size(), 30u);
  for (std::size_t j = 0; j < coord.domain.size(); ++j) EXPECT_EQ(full.angles[coord.domain[j]], coord.angles[j]);
  for (double a : full.angles) {
    EXPECT_GE(a, 0.0);
    EXPECT_LT(a, kTwoPi);
  }
}

TEST(ExtendCoordinate, SharedAngle) {
  const PointCloud cloud(1, {0.0, 1.0, 2.0, 3.0});
  CircularCoordinate coord;
  coord.domain = {0, 3};
  coord.angles = {1.3, 1.3};
  coord.flags.assign(2, 0);
  const auto full = extend_coordinate(coord, cloud, 1.0);
  EXPECT_NEAR(full.angles[1], 1.3, 1e-12);
  EXPECT_NEAR(full.angles[2], 1.3, 1e-12);
}

TEST(ExtendCoordinate, OppositeAnglesFallBackAndFlag) {
  const PointCloud cloud(1, {-1.0, 0.0, 1.0});
  CircularCoordinate coord;
  coord.domain = {0, 2};
  coord.angles = {0.0, kPi};
  coord.flags.assign(2, 0);
  const auto full = extend_coordinate(coord, cloud, 1.0);
  EXPECT_TRUE(full.flags[1] & kFlagDegenerateExtension);
  // Both neighbors are equally near; the fallback takes the first.
  EXPECT_EQ(full.angles[1], 0.0);
}

TEST(ExtendCoordinate, QuarterTurnsAverage) {
  const PointCloud cloud(1, {-1.0, 0.0, 1.0});
  CircularCoordinate coord;
  coord.domain = {0, 2};
  coord.angles = {0.0, kPi / 2};
  coord.flags.assign(2, 0);
  EXPECT_NEAR(extend_coordinate(coord, cloud, 1.0).angles[1], kPi / 4, 1e-12);
}

TEST(ExtendCoordinate, EmptyDomainThrows) {
  const PointCloud cloud(1, {0.0, 1.0});
  EXPECT_THROW(extend_coordinate(CircularCoordinate{}, cloud, 1.0), EmptyDomainError);
}

TEST(ExtendCoordinate, FarDuplicateHasNoEffect) {
  // Point 3 sits far away; adding it to the domain leaves the angle at point 1 intact.
  const PointCloud cloud(1, {0.0, 0.3, 0.7, 100.0});
  CircularCoordinate near;
  near.domain = {0, 2};
  near.angles = {0.2, 1.0};
  near.flags.assign(2, 0);
  auto with_far = near;
  with_far.domain = {0, 2, 3};
  with_far.angles = {0.2, 1.0, 4.0};
  with_far.flags.assign(3, 0);
  EXPECT_NEAR(extend_coordinate(near, cloud, 2.0).angles[1], extend_coordinate(with_far, cloud, 2.0).angles[1],
              1e-12);
}
