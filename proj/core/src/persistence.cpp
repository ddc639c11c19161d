#include "circcoords/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace circcoords {

namespace {

constexpr std::size_t kMaxVertices = std::size_t{1} << 21;

std::uint64_t triangle_code(const Triangle& t, std::size_t n) {
  return t.a + n * (t.b + static_cast<std::uint64_t>(n) * t.c);
}

std::uint64_t edge_code(std::uint32_t u, std::uint32_t v, std::size_t n) {
  return static_cast<std::uint64_t>(u) * n + v;
}

bool is_prime(std::uint32_t p) {
  if (p < 2) return false;
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

std::uint32_t mod_mul(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
  return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % p);
}

std::uint32_t mod_inverse(std::uint32_t a, std::uint32_t p) {
  // Fermat: a^(p-2).
  std::uint32_t result = 1;
  std::uint32_t base = a % p;
  std::uint32_t e = p - 2;
  while (e > 0) {
    if (e & 1U) result = mod_mul(result, base, p);
    base = mod_mul(base, base, p);
    e >>= 1U;
  }
  return result;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

struct HeapEntry {
  Triangle t;
  std::uint32_t coef;
};

struct HeapGreater {
  bool operator()(const HeapEntry& x, const HeapEntry& y) const {
    return filtration_less(y.t, x.t);
  }
};

bool same_simplex(const Triangle& x, const Triangle& y) {
  return x.a == y.a && x.b == y.b && x.c == y.c;
}

using WorkingHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapGreater>;

// Coboundary of edges in a fixed filtration, over Z/p.
class CoboundaryMatrix {
 public:
  CoboundaryMatrix(const RipsFiltration& f, std::uint32_t prime)
      : f_(f), n_(f.vertex_count()), p_(prime), dist_(f.distances().data()),
        max_scale_(f.max_scale()) {}

  // Cofacets of e in increasing w are in lexicographic order, so the first one
  // attaining value == e.value is the minimum and ends the scan.
  bool min_cofacet(const Edge& e, HeapEntry& out) const {
    const double* du = dist_ + static_cast<std::size_t>(e.u) * n_;
    const double* dv = dist_ + static_cast<std::size_t>(e.v) * n_;
    bool found = false;
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_w = 0;
    for (std::uint32_t w = 0; w < n_; ++w) {
      const double a = du[w];
      const double b = dv[w];
      if (a > max_scale_ || b > max_scale_ || w == e.u || w == e.v) continue;
      const double value = std::max(e.value, std::max(a, b));
      if (value < best) {
        best = value;
        best_w = w;
        found = true;
        if (value == e.value) break;
      }
    }
    if (found) out = make_entry(e, best_w, best, 1);
    return found;
  }

  void push_coboundary(const Edge& e, std::uint32_t factor, WorkingHeap& heap) const {
    const double* du = dist_ + static_cast<std::size_t>(e.u) * n_;
    const double* dv = dist_ + static_cast<std::size_t>(e.v) * n_;
    for (std::uint32_t w = 0; w < n_; ++w) {
      const double a = du[w];
      const double b = dv[w];
      if (a > max_scale_ || b > max_scale_ || w == e.u || w == e.v) continue;
      heap.push(make_entry(e, w, std::max(e.value, std::max(a, b)), factor));
    }
  }

  std::uint32_t prime() const noexcept { return p_; }

 private:
  // Coefficient of (u, v) in the boundary of the triangle {u, v, w}:
  // -1 when w sits between u and v, +1 otherwise.
  HeapEntry make_entry(const Edge& e, std::uint32_t w, double value, std::uint32_t factor) const {
    HeapEntry entry;
    entry.t.value = value;
    if (w < e.u) {
      entry.t.a = w, entry.t.b = e.u, entry.t.c = e.v;
      entry.coef = factor;
    } else if (w < e.v) {
      entry.t.a = e.u, entry.t.b = w, entry.t.c = e.v;
      entry.coef = (p_ - factor) % p_;
    } else {
      entry.t.a = e.u, entry.t.b = e.v, entry.t.c = w;
      entry.coef = factor;
    }
    return entry;
  }

  const RipsFiltration& f_;
  std::size_t n_;
  std::uint32_t p_;
  const double* dist_;
  double max_scale_;
};

// Pops every copy of the top simplex, summing coefficients; returns the first
// nonzero sum (pushed back onto the heap) or false when the column is zero.
bool pop_pivot(WorkingHeap& heap, std::uint32_t p, HeapEntry& pivot) {
  while (!heap.empty()) {
    HeapEntry top = heap.top();
    heap.pop();
    while (!heap.empty() && same_simplex(heap.top().t, top.t)) {
      top.coef = (top.coef + heap.top().coef) % p;
      heap.pop();
    }
    if (top.coef != 0) {
      heap.push(top);
      pivot = top;
      return true;
    }
  }
  return false;
}

struct PivotOwner {
  std::uint32_t column;
  std::uint32_t coef;
};

using ReductionColumn = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

std::vector<CochainEntry> to_cochain(const ReductionColumn& column, const std::vector<Edge>& edges) {
  std::vector<CochainEntry> out;
  out.reserve(column.size());
  for (const auto& [idx, coef] : column) {
    if (coef == 0) continue;
    out.push_back({edges[idx].u, edges[idx].v, coef});
  }
  std::sort(out.begin(), out.end(), [](const CochainEntry& x, const CochainEntry& y) {
    return std::tie(x.u, x.v) < std::tie(y.u, y.v);
  });
  return out;
}

}  // namespace

RipsFiltration::RipsFiltration(std::size_t vertex_count, std::vector<double> distances,
                               double max_scale, const RipsOptions& options)
    : n_(vertex_count), max_scale_(max_scale), distances_(std::move(distances)) {
  if (n_ == 0) throw std::invalid_argument("RipsFiltration: no vertices");
  if (n_ >= kMaxVertices) throw std::invalid_argument("RipsFiltration: too many vertices");
  if (!(max_scale_ > 0.0)) throw std::invalid_argument("RipsFiltration: max_scale must be positive");
  if (distances_.size() != n_ * n_)
    throw std::invalid_argument("RipsFiltration: distance matrix has the wrong size");

  for (std::uint32_t u = 0; u < n_; ++u) {
    for (std::uint32_t v = u + 1; v < n_; ++v) {
      const double d = distance(u, v);
      if (d <= max_scale_) edges_.push_back({u, v, d});
    }
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& x, const Edge& y) { return filtration_less(x, y); });

  if (options.materialize_triangles) {
    for_each_triangle_up_to(max_scale_, [&](const Triangle& t) {
      if (triangles_.size() >= options.triangle_cap) {
        std::ostringstream msg;
        msg << "Rips complex at max_scale " << max_scale_ << " has more than "
            << options.triangle_cap << " triangles; use a smaller max_scale";
        throw RipsCapacityError(msg.str());
      }
      triangles_.push_back(t);
    });
    std::sort(triangles_.begin(), triangles_.end(),
              [](const Triangle& x, const Triangle& y) { return filtration_less(x, y); });
    materialized_ = true;
  }
}

std::vector<Edge> RipsFiltration::edges_up_to(double scale) const {
  const auto end = std::upper_bound(edges_.begin(), edges_.end(), scale,
                                    [](double s, const Edge& e) { return s < e.value; });
  return {edges_.begin(), end};
}

void RipsFiltration::for_each_triangle_up_to(double scale,
                                             const std::function<void(const Triangle&)>& f) const {
  const double limit = std::min(scale, max_scale_);
  // Upper neighbor lists at the scale.
  std::vector<std::vector<std::uint32_t>> up(n_);
  for (std::uint32_t u = 0; u < n_; ++u) {
    for (std::uint32_t v = u + 1; v < n_; ++v) {
      if (distance(u, v) <= limit) up[u].push_back(v);
    }
  }
  std::vector<char> mark(n_, 0);
  for (std::uint32_t a = 0; a < n_; ++a) {
    for (std::uint32_t w : up[a]) mark[w] = 1;
    for (std::uint32_t b : up[a]) {
      for (std::uint32_t c : up[b]) {
        if (!mark[c]) continue;
        const double value = std::max(distance(a, b), std::max(distance(a, c), distance(b, c)));
        f(Triangle{a, b, c, value});
      }
    }
    for (std::uint32_t w : up[a]) mark[w] = 0;
  }
}

RipsFiltration build_rips(const PointCloud& cloud, double max_scale, const RipsOptions& options) {
  return RipsFiltration(cloud.size(), pairwise_distances(cloud), max_scale, options);
}

double enclosing_radius(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double far = 0.0;
    for (std::size_t j = 0; j < n; ++j) far = std::max(far, cloud.distance(i, j));
    best = std::min(best, far);
  }
  return best;
}

std::vector<PersistenceBar> persistent_cohomology_h1(const RipsFiltration& filtration,
                                                     std::uint32_t prime) {
  if (!is_prime(prime)) throw std::invalid_argument("persistent_cohomology_h1: modulus is not prime");
  if (prime > 65521) throw std::invalid_argument("persistent_cohomology_h1: prime too large");

  const std::size_t n = filtration.vertex_count();
  const auto& edges = filtration.edges();

  // Dimension 0: edges that merge components are pivots of the vertex
  // coboundary and never start a dimension-1 class.
  std::vector<char> cleared(edges.size(), 0);
  {
    UnionFind uf(n);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (uf.unite(edges[i].u, edges[i].v)) cleared[i] = 1;
    }
  }

  CoboundaryMatrix coboundary(filtration, prime);
  std::unordered_map<std::uint64_t, PivotOwner> owners;
  owners.reserve(edges.size());
  // Reduction columns that differ from the bare edge.
  std::unordered_map<std::uint32_t, ReductionColumn> reductions;

  std::vector<PersistenceBar> bars;
  auto record = [&](const Edge& e, double death, std::vector<CochainEntry> rep) {
    if (death > e.value) {
      PersistenceBar bar;
      bar.birth = e.value;
      bar.death = death;
      bar.representative = std::move(rep);
      bar.prime = prime;
      bars.push_back(std::move(bar));
    }
  };
  const double inf = std::numeric_limits<double>::infinity();

  for (std::size_t k = edges.size(); k-- > 0;) {
    if (cleared[k]) continue;
    const auto column = static_cast<std::uint32_t>(k);
    const Edge& e = edges[k];

    HeapEntry first;
    if (!coboundary.min_cofacet(e, first)) {
      record(e, inf, {{e.u, e.v, 1}});
      continue;
    }
    auto owner = owners.find(triangle_code(first.t, n));
    if (owner == owners.end()) {
      owners.emplace(triangle_code(first.t, n), PivotOwner{column, first.coef});
      record(e, first.t.value, {{e.u, e.v, 1}});
      continue;
    }

    // Full reduction: the pivot is already taken by a later edge.
    std::unordered_map<std::uint32_t, std::uint32_t> working{{column, 1}};
    WorkingHeap heap;
    coboundary.push_coboundary(e, 1, heap);
    HeapEntry pivot;
    bool has_pivot = pop_pivot(heap, prime, pivot);
    while (has_pivot) {
      owner = owners.find(triangle_code(pivot.t, n));
      if (owner == owners.end()) break;
      const PivotOwner other = owner->second;
      const std::uint32_t factor =
          (prime - mod_mul(pivot.coef, mod_inverse(other.coef, prime), prime)) % prime;
      auto add_edge = [&](std::uint32_t idx, std::uint32_t coef) {
        const std::uint32_t scaled = mod_mul(factor, coef, prime);
        auto& slot = working[idx];
        slot = (slot + scaled) % prime;
        coboundary.push_coboundary(edges[idx], scaled, heap);
      };
      if (auto it = reductions.find(other.column); it != reductions.end()) {
        for (const auto& [idx, coef] : it->second) add_edge(idx, coef);
      } else {
        add_edge(other.column, 1);
      }
      has_pivot = pop_pivot(heap, prime, pivot);
    }

    ReductionColumn reduced;
    reduced.reserve(working.size());
    for (const auto& [idx, coef] : working) {
      if (coef != 0) reduced.emplace_back(idx, coef);
    }
    std::sort(reduced.begin(), reduced.end());

    if (!has_pivot) {
      record(e, inf, to_cochain(reduced, edges));
      continue;
    }
    owners.emplace(triangle_code(pivot.t, n), PivotOwner{column, pivot.coef});
    record(e, pivot.t.value, to_cochain(reduced, edges));
    reductions.emplace(column, std::move(reduced));
  }

  std::sort(bars.begin(), bars.end(), [](const PersistenceBar& x, const PersistenceBar& y) {
    const double px = x.persistence();
    const double py = y.persistence();
    if (px != py) return px > py;
    return x.birth < y.birth;
  });
  return bars;
}

double median_kth_neighbor_distance(const PointCloud& cloud, int k) {
  if (k < 1) throw std::invalid_argument("median_kth_neighbor_distance: k must be positive");
  const std::size_t n = cloud.size();
  const auto rank = static_cast<std::size_t>(k);
  if (n <= rank) return 0.0;
  std::vector<double> kth(n);
  std::vector<double> row(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row[m++] = cloud.distance(i, j);
    }
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(rank - 1), row.end());
    kth[i] = row[rank - 1];
  }
  std::sort(kth.begin(), kth.end());
  return n % 2 == 1 ? kth[n / 2] : 0.5 * (kth[n / 2 - 1] + kth[n / 2]);
}

BarSelection select_bar(std::span<const PersistenceBar> bars, const PointCloud& cloud,
                        const BarSelectionOptions& options) {
  if (bars.empty()) {
    throw NoLoopDetected(
        "no dimension-1 persistence bar: classes are too small to reflect actual geometry, or "
        "the data is not described by a circular coordinate");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < bars.size(); ++i) {
    const double pi = bars[i].persistence();
    const double pb = bars[best].persistence();
    if (pi > pb || (pi == pb && bars[i].birth < bars[best].birth)) best = i;
  }

  BarSelection sel;
  sel.bar = bars[best];
  sel.index = best;
  sel.median_neighbor_distance = median_kth_neighbor_distance(cloud, options.neighbor_rank);

  if (sel.bar.is_finite() &&
      sel.bar.death < options.smallness_factor * sel.median_neighbor_distance) {
    sel.too_small = true;
    std::ostringstream msg;
    msg << "longest bar dies at " << sel.bar.death << ", not substantially larger than the median "
        << options.neighbor_rank << "-nearest-neighbor distance " << sel.median_neighbor_distance
        << "; the loop may be too small to reflect actual geometry";
    sel.warnings.push_back(msg.str());
  }
  const double longest = sel.bar.persistence();
  for (std::size_t i = 0; i < bars.size(); ++i) {
    if (i == best) continue;
    if (bars[i].persistence() >= options.multiplicity_fraction * longest) {
      sel.multiple_long_bars = true;
      std::ostringstream msg;
      msg << "a second bar (" << bars[i].birth << ", " << bars[i].death
          << ") is comparable to the longest; the data may carry several independent circular "
             "coordinates";
      sel.warnings.push_back(msg.str());
      break;
    }
  }
  return sel;
}

double choose_scale(const PersistenceBar& bar, double fraction, double max_scale) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("choose_scale: fraction must lie in (0, 1)");
  if (!bar.is_finite()) {
    if (!std::isfinite(max_scale))
      throw std::invalid_argument("choose_scale: infinite bar needs a finite max_scale");
    return max_scale;
  }
  return bar.birth + fraction * (bar.death - bar.birth);
}

std::int64_t symmetric_representative(std::uint32_t value, std::uint32_t prime) {
  const std::uint32_t v = value % prime;
  return 2 * static_cast<std::uint64_t>(v) <= prime ? static_cast<std::int64_t>(v)
                                                      : static_cast<std::int64_t>(v) - prime;
}

IntegerCocycle lift_cocycle(const PersistenceBar& bar, const RipsFiltration& filtration,
                            double scale) {
  if (!(scale > bar.birth && scale < bar.death))
    throw std::invalid_argument("lift_cocycle: scale must lie strictly inside the bar");

  const std::size_t n = filtration.vertex_count();
  IntegerCocycle cocycle;
  cocycle.scale = scale;
  std::unordered_map<std::uint64_t, std::int64_t> lookup;
  for (const auto& entry : bar.representative) {
    if (filtration.distance(entry.u, entry.v) > scale) continue;
    const std::int64_t lifted = symmetric_representative(entry.value, bar.prime);
    if (lifted == 0) continue;
    cocycle.values.push_back({entry.u, entry.v, lifted});
    lookup.emplace(edge_code(entry.u, entry.v, n), lifted);
  }

  auto value = [&](std::uint32_t u, std::uint32_t v) -> std::int64_t {
    auto it = lookup.find(edge_code(u, v, n));
    return it == lookup.end() ? 0 : it->second;
  };

  // Triangles without a support edge satisfy the condition trivially.
  std::vector<Triangle> offending;
  std::unordered_set<std::uint64_t> seen;
  for (const auto& entry : cocycle.values) {
    const double* du = filtration.distances().data() + static_cast<std::size_t>(entry.u) * n;
    const double* dv = filtration.distances().data() + static_cast<std::size_t>(entry.v) * n;
    for (std::uint32_t w = 0; w < n; ++w) {
      if (w == entry.u || w == entry.v || du[w] > scale || dv[w] > scale) continue;
      std::uint32_t t[3] = {entry.u, entry.v, w};
      std::sort(t, t + 3);
      const std::int64_t delta = value(t[1], t[2]) - value(t[0], t[2]) + value(t[0], t[1]);
      if (delta == 0) continue;
      Triangle tri{t[0], t[1], t[2],
                   std::max(filtration.distance(t[0], t[1]),
                            std::max(filtration.distance(t[0], t[2]), filtration.distance(t[1], t[2])))};
      if (seen.insert(triangle_code(tri, n)).second) offending.push_back(tri);
    }
  }
  if (!offending.empty()) {
    std::sort(offending.begin(), offending.end(),
              [](const Triangle& x, const Triangle& y) { return filtration_less(x, y); });
    std::ostringstream msg;
    msg << "integer lift of the mod-" << bar.prime << " cocycle fails on " << offending.size()
        << " triangle(s):";
    for (std::size_t i = 0; i < std::min<std::size_t>(offending.size(), 8); ++i) {
      msg << " (" << offending[i].a << "," << offending[i].b << "," << offending[i].c << ")";
    }
    throw LiftFailure(msg.str(), std::move(offending));
  }
  std::sort(cocycle.values.begin(), cocycle.values.end(),
            [](const IntegerCochainEntry& x, const IntegerCochainEntry& y) {
              return std::tie(x.u, x.v) < std::tie(y.u, y.v);
            });
  return cocycle;
}

LiftOutcome lift_with_retry(const RipsFiltration& filtration, std::span<const std::uint32_t> primes,
                            const std::function<LiftAttempt(std::uint32_t)>& attempt) {
  if (primes.empty()) throw std::invalid_argument("lift_with_retry: empty prime list");
  std::vector<Triangle> last_offending;
  std::string last_message;
  for (std::uint32_t p : primes) {
    LiftAttempt a = attempt(p);
    try {
      IntegerCocycle cocycle = lift_cocycle(a.bar, filtration, a.scale);
      return {std::move(cocycle), std::move(a), p};
    } catch (const LiftFailure& failure) {
      last_offending = failure.offending_triangles();
      last_message = failure.what();
    }
  }
  throw LiftFailure("integer lift failed for every prime; last: " + last_message,
                    std::move(last_offending));
}

CocycleExtraction extract_cocycle(const RipsFiltration& filtration, const PointCloud& cloud,
                                  const CocycleOptions& options) {
  CocycleExtraction result;
  auto attempt = [&](std::uint32_t p) {
    result.bars = persistent_cohomology_h1(filtration, p);
    result.selection = select_bar(result.bars, cloud, options.selection);
    const double scale =
        choose_scale(result.selection.bar, options.scale_fraction, filtration.max_scale());
    return LiftAttempt{result.selection.bar, scale};
  };
  LiftOutcome outcome = lift_with_retry(filtration, options.primes, attempt);
  result.scale = outcome.attempt.scale;
  result.prime = outcome.prime;
  result.cocycle = std::move(outcome.cocycle);
  return result;
}

}  // namespace circcoords
