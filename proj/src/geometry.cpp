#include "spe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace spe {
namespace {

bool lex_less(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Sorts a flat array of n-tuples lexicographically and drops duplicates.
std::vector<std::int32_t> sorted_unique(std::vector<std::int32_t> flat, int n) {
  const std::size_t count = flat.size() / n;
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  auto tuple = [&](std::size_t k) {
    return std::span<const std::int32_t>(flat.data() + k * n, static_cast<std::size_t>(n));
  };
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return lex_less(tuple(a), tuple(b)); });
  std::vector<std::int32_t> out;
  out.reserve(flat.size());
  for (std::size_t k = 0; k < count; ++k) {
    auto t = tuple(order[k]);
    if (k > 0 && std::equal(t.begin(), t.end(), tuple(order[k - 1]).begin())) continue;
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

struct LatticePoint {
  std::int64_t x;
  std::int64_t y;
};

std::int64_t cross(const LatticePoint& o, const LatticePoint& a, const LatticePoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

CubeSet::CubeSet(Eigen::VectorXd base_origin, double base_side, int generation)
    : base_origin_(std::move(base_origin)),
      base_side_(base_side),
      generation_(generation),
      side_(std::ldexp(base_side, -generation)) {
  if (base_origin_.size() < 1) throw std::invalid_argument("cube set needs a dimension");
  if (!(base_side_ > 0.0)) throw std::invalid_argument("cube side must be positive");
}

CubeSet CubeSet::from_origins(const std::vector<Eigen::VectorXd>& origins, double side) {
  if (origins.empty()) throw std::invalid_argument("from_origins needs at least one origin");
  CubeSet set(origins.front(), side);
  const int n = set.dimension();
  std::vector<std::int32_t> cell(n);
  for (const Eigen::VectorXd& o : origins) {
    if (o.size() != n) throw std::invalid_argument("origins differ in dimension");
    for (int d = 0; d < n; ++d) {
      const double t = (o(d) - set.base_origin_(d)) / side;
      const double r = std::round(t);
      if (std::abs(t - r) > 1e-9) throw std::invalid_argument("origin is off the lattice");
      cell[d] = static_cast<std::int32_t>(r);
    }
    set.insert(cell);
  }
  return set;
}

Eigen::VectorXd CubeSet::origin(std::size_t k) const {
  Eigen::VectorXd o(dimension());
  for (int d = 0; d < dimension(); ++d) o(d) = origin(k, d);
  return o;
}

void CubeSet::insert(std::span<const std::int32_t> c) {
  if (static_cast<int>(c.size()) != dimension()) throw std::invalid_argument("cell arity");
  std::size_t lo = 0;
  std::size_t hi = size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (lex_less(cell(mid), c)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < size() && std::equal(c.begin(), c.end(), cell(lo).begin())) return;
  cells_.insert(cells_.begin() + static_cast<std::ptrdiff_t>(lo * dimension()), c.begin(), c.end());
}

void CubeSet::erase(std::size_t k) {
  const auto first = cells_.begin() + static_cast<std::ptrdiff_t>(k * dimension());
  cells_.erase(first, first + dimension());
}

void CubeSet::retain(const std::vector<bool>& keep) {
  const int n = dimension();
  std::size_t out = 0;
  for (std::size_t k = 0; k < size(); ++k) {
    if (!keep[k]) continue;
    if (out != k) std::copy_n(cells_.begin() + k * n, n, cells_.begin() + out * n);
    ++out;
  }
  cells_.resize(out * n);
}

std::optional<std::size_t> CubeSet::find(std::span<const std::int32_t> c) const {
  std::size_t lo = 0;
  std::size_t hi = size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (lex_less(cell(mid), c)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < size() && std::equal(c.begin(), c.end(), cell(lo).begin())) return lo;
  return std::nullopt;
}

void CubeSet::assign(int generation, std::vector<std::int32_t> cells) {
  generation_ = generation;
  side_ = std::ldexp(base_side_, -generation);
  cells_ = std::move(cells);
}

std::uint64_t pack_cell(std::span<const std::int32_t> cell) {
  const int n = static_cast<int>(cell.size());
  const int bits = 64 / n;
  const std::int64_t bias = std::int64_t{1} << (bits - 1);
  std::uint64_t key = 0;
  for (int d = 0; d < n; ++d) {
    const std::int64_t v = static_cast<std::int64_t>(cell[d]) + bias;
    if (v < 0 || (bits < 64 && v >= (std::int64_t{1} << bits))) {
      throw std::out_of_range("lattice coordinate too large to pack");
    }
    key = (bits == 64 ? 0 : key << bits) | static_cast<std::uint64_t>(v);
  }
  return key;
}

CubeLocator::CubeLocator(const CubeSet& cubes) : cubes_(&cubes) {
  index_.reserve(cubes.size() * 2);
  for (std::size_t k = 0; k < cubes.size(); ++k) index_.emplace(pack_cell(cubes.cell(k)), k);
}

std::optional<std::size_t> CubeLocator::find(std::span<const std::int32_t> cell) const {
  const auto it = index_.find(pack_cell(cell));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> CubeLocator::locate(const Eigen::VectorXd& point,
                                               double tolerance) const {
  const CubeSet& cubes = *cubes_;
  const int n = cubes.dimension();
  if (point.size() != n) throw std::invalid_argument("point dimension mismatch");
  const double side = cubes.side();
  const double slack = tolerance / side;
  std::vector<std::int32_t> low(n);
  std::vector<std::int32_t> high(n);
  for (int d = 0; d < n; ++d) {
    const double t = (point(d) - cubes.base_origin()(d)) / side;
    if (!std::isfinite(t) || std::abs(t) > 1e9) return std::nullopt;
    low[d] = static_cast<std::int32_t>(std::ceil(t - 1.0 - slack));
    high[d] = static_cast<std::int32_t>(std::floor(t + slack));
    if (low[d] > high[d]) return std::nullopt;
  }
  // Odometer over candidate cells in lexicographic order.
  std::vector<std::int32_t> cell = low;
  while (true) {
    if (auto hit = find(cell)) return hit;
    int d = n - 1;
    while (d >= 0 && cell[d] == high[d]) {
      cell[d] = low[d];
      --d;
    }
    if (d < 0) return std::nullopt;
    ++cell[d];
  }
}

CubeSet initial_cube(const PayoffBounds& bounds, int players) {
  if (bounds.low > bounds.high) throw std::invalid_argument("payoff bounds are inverted");
  const double side = bounds.high > bounds.low ? bounds.high - bounds.low : 1.0;
  CubeSet cubes(Eigen::VectorXd::Constant(players, bounds.low), side);
  cubes.insert(std::vector<std::int32_t>(players, 0));
  return cubes;
}

CubeSet split_all(const CubeSet& cubes) {
  const int n = cubes.dimension();
  const std::size_t children = std::size_t{1} << n;
  std::vector<std::int32_t> flat;
  flat.reserve(cubes.raw_cells().size() * children);
  for (std::size_t k = 0; k < cubes.size(); ++k) {
    const auto parent = cubes.cell(k);
    for (std::size_t bits = 0; bits < children; ++bits) {
      for (int d = 0; d < n; ++d) {
        flat.push_back(2 * parent[d] + static_cast<std::int32_t>((bits >> (n - 1 - d)) & 1U));
      }
    }
  }
  CubeSet out(cubes.base_origin(), cubes.base_side(), cubes.generation() + 1);
  out.assign(cubes.generation() + 1, sorted_unique(std::move(flat), n));
  return out;
}

Eigen::VectorXd min_origin(const CubeSet& cubes) {
  if (cubes.empty()) throw std::invalid_argument("min_origin of an empty cube set");
  const int n = cubes.dimension();
  std::vector<std::int32_t> best(cubes.cell(0).begin(), cubes.cell(0).end());
  for (std::size_t k = 1; k < cubes.size(); ++k) {
    const auto c = cubes.cell(k);
    for (int d = 0; d < n; ++d) best[d] = std::min(best[d], c[d]);
  }
  Eigen::VectorXd out(n);
  for (int d = 0; d < n; ++d) out(d) = cubes.base_origin()(d) + cubes.side() * best[d];
  return out;
}

std::vector<Cluster> get_clusters(const CubeSet& cubes) {
  const int n = cubes.dimension();
  const CubeLocator locator(cubes);
  std::vector<bool> covered(cubes.size(), false);
  std::vector<Cluster> clusters;

  std::vector<std::int32_t> start(n);
  std::vector<std::int32_t> extent(n);
  std::vector<std::int32_t> probe(n);

  // Visits every cell of the box start + [0, extent) whose coordinate along
  // `fixed` equals `value`; stops early when `visit` returns false.
  auto for_slab = [&](int fixed, std::int32_t value, auto&& visit) {
    for (int d = 0; d < n; ++d) probe[d] = start[d];
    probe[fixed] = value;
    while (true) {
      if (!visit(probe)) return false;
      int d = n - 1;
      while (d >= 0 && (d == fixed || probe[d] == start[d] + extent[d] - 1)) {
        if (d != fixed) probe[d] = start[d];
        --d;
      }
      if (d < 0) return true;
      ++probe[d];
    }
  };
  auto free_cell = [&](const std::vector<std::int32_t>& c) {
    const auto hit = locator.find(c);
    return hit.has_value() && !covered[*hit];
  };

  for (std::size_t k = 0; k < cubes.size(); ++k) {
    if (covered[k]) continue;
    const auto c = cubes.cell(k);
    std::copy(c.begin(), c.end(), start.begin());
    std::fill(extent.begin(), extent.end(), 1);
    for (int d = 0; d < n; ++d) {
      while (for_slab(d, start[d] + extent[d], free_cell)) ++extent[d];
    }
    for (std::int32_t v = start[0]; v < start[0] + extent[0]; ++v) {
      for_slab(0, v, [&](const std::vector<std::int32_t>& cell) {
        covered[*locator.find(cell)] = true;
        return true;
      });
    }
    Cluster cluster{cubes.origin(k), Eigen::VectorXd(n)};
    for (int d = 0; d < n; ++d) cluster.lengths(d) = cubes.side() * extent[d];
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

std::vector<Eigen::Vector2d> hull_vertices(const CubeSet& cubes) {
  return hull_vertices(cubes, std::vector<bool>(cubes.size(), true));
}

std::vector<Eigen::Vector2d> hull_vertices(const CubeSet& cubes, const std::vector<bool>& keep) {
  if (cubes.dimension() != 2) throw std::invalid_argument("convex hull needs two dimensions");

  // Cells are sorted by x, then y: the first and last kept cell of each
  // column carry every vertex that can lie on the hull.
  std::vector<LatticePoint> points;
  for (std::size_t k = 0; k < cubes.size();) {
    const std::int32_t x = cubes.cell(k)[0];
    std::size_t end = k;
    while (end < cubes.size() && cubes.cell(end)[0] == x) ++end;
    std::size_t first = k;
    while (first < end && !keep[first]) ++first;
    if (first < end) {
      std::size_t last = end - 1;
      while (!keep[last]) --last;
      const std::int64_t bottom = cubes.cell(first)[1];
      const std::int64_t top = cubes.cell(last)[1] + 1;
      points.push_back({x, bottom});
      points.push_back({x + 1, bottom});
      points.push_back({x, top});
      points.push_back({x + 1, top});
    }
    k = end;
  }
  if (points.empty()) throw std::invalid_argument("convex hull of an empty cube set");
  std::sort(points.begin(), points.end(), [](const LatticePoint& a, const LatticePoint& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const LatticePoint& a, const LatticePoint& b) {
                             return a.x == b.x && a.y == b.y;
                           }),
               points.end());

  // Monotone chain; drops collinear points.
  std::vector<LatticePoint> hull(2 * points.size());
  std::size_t h = 0;
  for (const LatticePoint& p : points) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], p) <= 0) --h;
    hull[h++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = h + 1; i-- > 0;) {
    const LatticePoint& p = points[i];
    while (h >= lower && cross(hull[h - 2], hull[h - 1], p) <= 0) --h;
    hull[h++] = p;
  }
  hull.resize(h - 1);

  std::vector<Eigen::Vector2d> out;
  out.reserve(hull.size());
  const Eigen::VectorXd& base = cubes.base_origin();
  for (const LatticePoint& p : hull) {
    out.emplace_back(base(0) + cubes.side() * static_cast<double>(p.x),
                     base(1) + cubes.side() * static_cast<double>(p.y));
  }
  return out;
}

std::vector<HalfPlane> halfplanes_from_hull(const std::vector<Eigen::Vector2d>& hull) {
  std::vector<HalfPlane> planes;
  const std::size_t m = hull.size();
  planes.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d& p = hull[i];
    const Eigen::Vector2d edge = hull[(i + 1) % m] - p;
    const Eigen::Vector2d normal = Eigen::Vector2d(edge.y(), -edge.x()).normalized();
    planes.push_back({normal.x(), normal.y(), normal.dot(p)});
  }
  return planes;
}

std::vector<HalfPlane> get_halfplanes(const CubeSet& cubes) {
  return halfplanes_from_hull(hull_vertices(cubes));
}

std::optional<Hypercube> locate(const Eigen::VectorXd& point, const CubeSet& cubes) {
  if (cubes.empty()) return std::nullopt;
  const CubeLocator locator(cubes);
  if (auto k = locator.locate(point)) return cubes.cube(*k);
  return std::nullopt;
}

}  // namespace spe
