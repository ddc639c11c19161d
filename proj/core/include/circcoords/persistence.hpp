#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "circcoords/errors.hpp"
#include "circcoords/point_cloud.hpp"

namespace circcoords {

struct Edge {
  std::uint32_t u = 0;  // u < v
  std::uint32_t v = 0;
  double value = 0.0;
};

struct Triangle {
  std::uint32_t a = 0;  // a < b < c
  std::uint32_t b = 0;
  std::uint32_t c = 0;
  double value = 0.0;
};

/// Filtration order: value first, then lexicographic vertex order.
inline bool filtration_less(const Edge& x, const Edge& y) {
  return std::tie(x.value, x.u, x.v) < std::tie(y.value, y.u, y.v);
}
inline bool filtration_less(const Triangle& x, const Triangle& y) {
  return std::tie(x.value, x.a, x.b, x.c) < std::tie(y.value, y.a, y.b, y.c);
}

struct RipsOptions {
  /// When false only edges are stored; triangles are enumerated on demand from
  /// the distance matrix. Needed for clouds whose 2-skeleton does not fit in memory.
  bool materialize_triangles = true;
  std::size_t triangle_cap = 20'000'000;
};

/// Vietoris-Rips 2-skeleton up to max_scale.
class RipsFiltration {
 public:
  RipsFiltration(std::size_t vertex_count, std::vector<double> distances, double max_scale,
                 const RipsOptions& options = {});

  std::size_t vertex_count() const noexcept { return n_; }
  double max_scale() const noexcept { return max_scale_; }

  /// Sorted in filtration order.
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  /// Sorted in filtration order; empty unless triangles_materialized().
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
  bool triangles_materialized() const noexcept { return materialized_; }

  double distance(std::uint32_t u, std::uint32_t v) const noexcept {
    return distances_[static_cast<std::size_t>(u) * n_ + v];
  }
  bool has_edge(std::uint32_t u, std::uint32_t v) const noexcept {
    return u != v && distance(u, v) <= max_scale_;
  }
  const std::vector<double>& distances() const noexcept { return distances_; }

  /// Edges with value <= scale, in filtration order.
  std::vector<Edge> edges_up_to(double scale) const;

  /// Calls f(Triangle) for every triangle with value <= scale (unordered).
  void for_each_triangle_up_to(double scale, const std::function<void(const Triangle&)>& f) const;

 private:
  std::size_t n_;
  double max_scale_;
  std::vector<double> distances_;
  std::vector<Edge> edges_;
  std::vector<Triangle> triangles_;
  bool materialized_ = false;
};

/// Throws RipsCapacityError when materialized triangles would exceed the cap.
RipsFiltration build_rips(const PointCloud& cloud, double max_scale, const RipsOptions& options = {});

/// min_i max_j d(i, j); every class of the Rips filtration dies by this scale.
double enclosing_radius(const PointCloud& cloud);

/// Edge value of a mod-p cochain, with u < v.
struct CochainEntry {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  std::uint32_t value = 0;
};

struct PersistenceBar {
  double birth = 0.0;
  double death = std::numeric_limits<double>::infinity();
  /// Cocycle mod prime, valid on the complex at every scale in [birth, death).
  std::vector<CochainEntry> representative;
  std::uint32_t prime = 47;

  bool is_finite() const noexcept { return death != std::numeric_limits<double>::infinity(); }
  double persistence() const noexcept { return death - birth; }
};

/// Dimension-1 persistent cohomology over Z/prime by reduction of the
/// coboundary matrix in decreasing filtration order, with the dimension-0
/// death edges cleared. Bars with birth == death are dropped; the result is
/// sorted by (persistence desc, birth asc).
std::vector<PersistenceBar> persistent_cohomology_h1(const RipsFiltration& filtration,
                                                     std::uint32_t prime = 47);

struct BarSelectionOptions {
  double smallness_factor = 2.0;
  double multiplicity_fraction = 0.5;
  int neighbor_rank = 3;
};

struct BarSelection {
  PersistenceBar bar;
  std::size_t index = 0;
  double median_neighbor_distance = 0.0;
  bool too_small = false;
  bool multiple_long_bars = false;
  std::vector<std::string> warnings;
};

/// Median over points of the distance to the k-th nearest other point.
/// Returns 0 when the cloud has k points or fewer.
double median_kth_neighbor_distance(const PointCloud& cloud, int k);

/// Picks the longest bar (ties: earlier birth). Throws NoLoopDetected on an empty list.
BarSelection select_bar(std::span<const PersistenceBar> bars, const PointCloud& cloud,
                        const BarSelectionOptions& options = {});

/// birth + fraction * (death - birth); infinite bars fall back to max_scale.
double choose_scale(const PersistenceBar& bar, double fraction = 0.5,
                    double max_scale = std::numeric_limits<double>::infinity());

struct IntegerCochainEntry {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  std::int64_t value = 0;
};

/// Integer cocycle on the complex at `scale`; only nonzero edges are listed.
struct IntegerCocycle {
  std::vector<IntegerCochainEntry> values;
  double scale = 0.0;
};

class LiftFailure : public Error {
 public:
  LiftFailure(const std::string& what, std::vector<Triangle> offending)
      : Error(what), offending_(std::move(offending)) {}
  const std::vector<Triangle>& offending_triangles() const noexcept { return offending_; }

 private:
  std::vector<Triangle> offending_;
};

/// Symmetric representative in (-p/2, p/2].
std::int64_t symmetric_representative(std::uint32_t value, std::uint32_t prime);

/// Lifts the representative restricted to edges <= scale to integers and checks
/// the integer cocycle condition on every triangle <= scale. Throws LiftFailure
/// listing the violating triangles.
IntegerCocycle lift_cocycle(const PersistenceBar& bar, const RipsFiltration& filtration,
                            double scale);

struct LiftAttempt {
  PersistenceBar bar;
  double scale = 0.0;
};

struct LiftOutcome {
  IntegerCocycle cocycle;
  LiftAttempt attempt;
  std::uint32_t prime = 0;
};

/// Tries each prime in turn: attempt(prime) supplies the bar and scale, which are
/// then lifted. Throws the last LiftFailure once the list is exhausted.
LiftOutcome lift_with_retry(const RipsFiltration& filtration, std::span<const std::uint32_t> primes,
                            const std::function<LiftAttempt(std::uint32_t)>& attempt);

struct CocycleOptions {
  std::vector<std::uint32_t> primes{47, 53, 59};
  double scale_fraction = 0.5;
  BarSelectionOptions selection;
};

struct CocycleExtraction {
  std::vector<PersistenceBar> bars;
  BarSelection selection;
  double scale = 0.0;
  std::uint32_t prime = 0;
  IntegerCocycle cocycle;
};

/// PH1 -> longest bar -> scale -> integer lift, retrying primes on lift failure.
CocycleExtraction extract_cocycle(const RipsFiltration& filtration, const PointCloud& cloud,
                                  const CocycleOptions& options = {});

}  // namespace circcoords
