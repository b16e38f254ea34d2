#include "oracles/brute_hull.hpp"

#include "spe/geometry.hpp"

#include <doctest.h>

#include <map>
#include <random>
#include <set>

using doctest::Approx;

namespace {

spe::CubeSet unit_cubes(std::initializer_list<std::pair<double, double>> origins) {
  std::vector<Eigen::VectorXd> list;
  for (const auto& [x, y] : origins) list.push_back(Eigen::Vector2d(x, y));
  return spe::CubeSet::from_origins(list, 1.0);
}

std::set<std::vector<std::int32_t>> cell_set(const spe::CubeSet& cubes) {
  std::set<std::vector<std::int32_t>> out;
  for (std::size_t k = 0; k < cubes.size(); ++k) {
    out.emplace(cubes.cell(k).begin(), cubes.cell(k).end());
  }
  return out;
}

// Lattice cells of `cubes` covered by the clusters, with multiplicity.
std::map<std::vector<std::int32_t>, int> cluster_cells(const spe::CubeSet& cubes,
                                                       const std::vector<spe::Cluster>& clusters) {
  std::map<std::vector<std::int32_t>, int> out;
  const double side = cubes.side();
  for (const auto& c : clusters) {
    const Eigen::VectorXd start = (c.origin - cubes.base_origin()) / side;
    const Eigen::VectorXd count = c.lengths / side;
    for (int x = 0; x < std::lround(count(0)); ++x) {
      for (int y = 0; y < std::lround(count(1)); ++y) {
        ++out[{static_cast<std::int32_t>(std::lround(start(0))) + x,
               static_cast<std::int32_t>(std::lround(start(1))) + y}];
      }
    }
  }
  return out;
}

spe::CubeSet random_set(std::mt19937_64& rng, int generation, double keep) {
  spe::CubeSet cubes = spe::initial_cube({-1.0, 3.0}, 2);
  for (int g = 0; g < generation; ++g) cubes = spe::split_all(cubes);
  std::bernoulli_distribution coin(keep);
  std::vector<bool> flags(cubes.size());
  bool any = false;
  for (std::size_t k = 0; k < flags.size(); ++k) {
    flags[k] = coin(rng);
    any = any || flags[k];
  }
  if (!any) flags[0] = true;
  cubes.retain(flags);
  return cubes;
}

double polygon_area(const std::vector<Eigen::Vector2d>& hull) {
  double area = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& p = hull[i];
    const auto& q = hull[(i + 1) % hull.size()];
    area += p.x() * q.y() - q.x() * p.y();
  }
  return area / 2.0;
}

}  // namespace

TEST_CASE("initial cube") {
  const auto pd = spe::initial_cube({-1.0, 3.0}, 2);
  REQUIRE(pd.size() == 1);
  CHECK(pd.origin(0) == Eigen::Vector2d(-1.0, -1.0));
  CHECK(pd.side() == 4.0);
  const auto unit = spe::initial_cube({0.0, 2.0}, 2);
  CHECK(unit.origin(0) == Eigen::Vector2d(0.0, 0.0));
  CHECK(unit.side() == 2.0);
  const auto flat = spe::initial_cube({5.0, 5.0}, 2);
  CHECK(flat.origin(0) == Eigen::Vector2d(5.0, 5.0));
  CHECK(flat.side() == 1.0);
}

TEST_CASE("split all") {
  auto cubes = spe::initial_cube({0.0, 1.0}, 2);
  const auto children = spe::split_all(cubes);
  REQUIRE(children.size() == 4);
  CHECK(children.side() == 0.5);
  CHECK(children.generation() == 1);
  CHECK(children.origin(0) == Eigen::Vector2d(0.0, 0.0));
  CHECK(children.origin(1) == Eigen::Vector2d(0.0, 0.5));
  CHECK(children.origin(2) == Eigen::Vector2d(0.5, 0.0));
  CHECK(children.origin(3) == Eigen::Vector2d(0.5, 0.5));

  const auto pair = unit_cubes({{0, 0}, {3, 1}});
  CHECK(spe::split_all(pair).size() == 8);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto set = random_set(rng, 3, 0.5);
    const auto split = spe::split_all(set);
    const double before = static_cast<double>(set.size()) * set.side() * set.side();
    const double after = static_cast<double>(split.size()) * split.side() * split.side();
    CHECK(before == after);
    // Every child sits inside the parent it came from.
    for (std::size_t k = 0; k < split.size(); ++k) {
      std::vector<std::int32_t> parent{split.cell(k)[0] >> 1, split.cell(k)[1] >> 1};
      CHECK(set.find(parent).has_value());
    }
  }
}

TEST_CASE("min origin") {
  CHECK(spe::min_origin(unit_cubes({{0, 0}})) == Eigen::Vector2d(0, 0));
  CHECK(spe::min_origin(unit_cubes({{0, 0}, {-1, 2}})) == Eigen::Vector2d(-1, 0));
  CHECK(spe::min_origin(spe::initial_cube({-1.0, 3.0}, 2)) == Eigen::Vector2d(-1, -1));
  spe::CubeSet empty(Eigen::Vector2d(0, 0), 1.0);
  CHECK_THROWS_AS(spe::min_origin(empty), std::invalid_argument);
}

TEST_CASE("min origin is monotone under removals") {
  std::mt19937_64 rng(2);
  auto cubes = random_set(rng, 4, 0.8);
  Eigen::VectorXd previous = spe::min_origin(cubes);
  while (cubes.size() > 1) {
    std::uniform_int_distribution<std::size_t> pick(0, cubes.size() - 1);
    cubes.erase(pick(rng));
    const Eigen::VectorXd current = spe::min_origin(cubes);
    CHECK((current.array() >= previous.array()).all());
    previous = current;
  }
}

TEST_CASE("cells stay sorted, aligned and disjoint after random edits") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto cubes = random_set(rng, 2, 0.7);
    for (int step = 0; step < 4; ++step) {
      cubes = spe::split_all(cubes);
      std::bernoulli_distribution coin(0.8);
      std::vector<bool> keep(cubes.size());
      for (std::size_t k = 0; k < keep.size(); ++k) keep[k] = coin(rng);
      keep[0] = true;
      cubes.retain(keep);
      for (std::size_t k = 1; k < cubes.size(); ++k) {
        const auto a = cubes.cell(k - 1);
        const auto b = cubes.cell(k);
        CHECK(std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()));
      }
      for (std::size_t k = 0; k < cubes.size(); ++k) {
        for (int d = 0; d < 2; ++d) {
          const double t = (cubes.origin(k, d) - (-1.0)) / cubes.side();
          CHECK(t == std::round(t));
        }
      }
    }
  }
}

TEST_CASE("insert and find") {
  spe::CubeSet cubes(Eigen::Vector2d(0, 0), 1.0);
  const std::vector<std::int32_t> a{1, 0};
  const std::vector<std::int32_t> b{0, 5};
  const std::vector<std::int32_t> c{-2, 3};
  cubes.insert(a);
  cubes.insert(b);
  cubes.insert(c);
  cubes.insert(a);
  REQUIRE(cubes.size() == 3);
  CHECK(*cubes.find(c) == 0);
  CHECK(*cubes.find(b) == 1);
  CHECK(*cubes.find(a) == 2);
  const std::vector<std::int32_t> missing{7, 7};
  CHECK_FALSE(cubes.find(missing).has_value());
  CHECK_THROWS_AS(spe::CubeSet::from_origins({Eigen::Vector2d(0, 0), Eigen::Vector2d(0.5, 0)}, 1.0),
                  std::invalid_argument);
}

TEST_CASE("clusters") {
  const auto column = unit_cubes({{0, 0}, {0, 1}});
  auto clusters = spe::get_clusters(column);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].origin == Eigen::Vector2d(0, 0));
  CHECK(clusters[0].lengths == Eigen::Vector2d(1, 2));

  const auto single = unit_cubes({{2, 3}});
  clusters = spe::get_clusters(single);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].origin == Eigen::Vector2d(2, 3));
  CHECK(clusters[0].lengths == Eigen::Vector2d(1, 1));

  const auto ell = unit_cubes({{0, 0}, {1, 0}, {0, 1}});
  clusters = spe::get_clusters(ell);
  CHECK(clusters.size() == 2);
  const auto covered = cluster_cells(ell, clusters);
  CHECK(covered.size() == 3);
  for (const auto& [cell, count] : covered) CHECK(count == 1);
}

TEST_CASE("clusters cover exactly the cells of the set") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const auto cubes = random_set(rng, 4, trial % 2 == 0 ? 0.5 : 0.9);
    const auto clusters = spe::get_clusters(cubes);
    CHECK(clusters.size() <= cubes.size());
    const auto covered = cluster_cells(cubes, clusters);
    const auto cells = cell_set(cubes);
    CHECK(covered.size() == cells.size());
    for (const auto& [cell, count] : covered) {
      CHECK(count == 1);
      CHECK(cells.count(cell) == 1);
    }
    CHECK(spe::get_clusters(cubes).size() == clusters.size());
  }
}

TEST_CASE("half-planes of a single cube") {
  const auto planes = spe::get_halfplanes(unit_cubes({{0, 0}}));
  REQUIRE(planes.size() == 4);
  for (const auto& p : planes) {
    CHECK(std::hypot(p.phi, p.psi) == Approx(1.0));
    CHECK(p.slack(0.5, 0.5) == Approx(0.5));
  }
}

TEST_CASE("hull of two diagonal cubes") {
  const auto hull = spe::hull_vertices(unit_cubes({{0, 0}, {1, 1}}));
  std::vector<Eigen::Vector2d> expected{{0, 0}, {1, 0}, {2, 1}, {2, 2}, {1, 2}, {0, 1}};
  REQUIRE(hull.size() == expected.size());
  for (std::size_t i = 0; i < hull.size(); ++i) CHECK(hull[i] == expected[i]);
}

TEST_CASE("hull of collinear cubes is their bounding rectangle") {
  const auto cubes = unit_cubes({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  CHECK(spe::get_halfplanes(cubes).size() == 4);
  const auto hull = spe::hull_vertices(cubes);
  CHECK(polygon_area(hull) == Approx(4.0));
}

TEST_CASE("hull matches a brute-force hull and covers every cube") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    const auto cubes = random_set(rng, 3, 0.3);
    std::vector<Eigen::Vector2d> corners;
    for (std::size_t k = 0; k < cubes.size(); ++k) {
      for (int dx = 0; dx < 2; ++dx) {
        for (int dy = 0; dy < 2; ++dy) {
          corners.emplace_back(cubes.origin(k, 0) + dx * cubes.side(),
                               cubes.origin(k, 1) + dy * cubes.side());
        }
      }
    }
    auto hull = spe::hull_vertices(cubes);
    CHECK(polygon_area(hull) >= static_cast<double>(cubes.size()) * cubes.side() * cubes.side() - 1e-12);
    const auto planes = spe::halfplanes_from_hull(hull);
    for (const auto& v : corners) {
      for (const auto& p : planes) CHECK(p.slack(v.x(), v.y()) >= -1e-9);
    }
    for (const auto& h : hull) {
      CHECK(std::any_of(corners.begin(), corners.end(), [&](const Eigen::Vector2d& c) { return c == h; }));
    }
    std::sort(hull.begin(), hull.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
      return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    const auto brute = oracle::brute_hull_vertices(corners);
    REQUIRE(brute.size() == hull.size());
    for (std::size_t i = 0; i < hull.size(); ++i) CHECK(brute[i] == hull[i]);
  }
  spe::CubeSet three(Eigen::Vector3d(0, 0, 0), 1.0);
  CHECK_THROWS_AS(spe::get_halfplanes(three), std::invalid_argument);
}

TEST_CASE("locate") {
  const auto one = unit_cubes({{0, 0}});
  REQUIRE(spe::locate(Eigen::Vector2d(0.5, 0.5), one).has_value());
  const auto pair = unit_cubes({{0, 0}, {1, 0}});
  const auto hit = spe::locate(Eigen::Vector2d(1.0, 0.5), pair);
  REQUIRE(hit.has_value());
  CHECK(hit->origin == Eigen::Vector2d(0, 0));
  CHECK_FALSE(spe::locate(Eigen::Vector2d(9, 9), pair).has_value());

  const spe::CubeLocator locator(pair);
  CHECK(locator.locate(Eigen::Vector2d(2.0 + 1e-12, 0.5), 1e-9) == std::optional<std::size_t>(1));
  CHECK_FALSE(locator.locate(Eigen::Vector2d(2.0 + 1e-6, 0.5), 1e-9).has_value());
}
