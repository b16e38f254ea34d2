#include "spe/support_program.hpp"

#include "spe/simplex.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace spe {
namespace {

// Loosening applied to the interval prefilters so they never reject a
// system the simplex would accept at its feasibility tolerance.
constexpr double kPrefilterSlack = 1e-7;

std::vector<std::vector<int>> nonempty_subsets(int n) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 1; mask < (1U << n); ++mask) {
    std::vector<int> s;
    for (int a = 0; a < n; ++a) {
      if (mask & (1U << a)) s.push_back(a);
    }
    out.push_back(std::move(s));
  }
  return out;
}

void require_two_players(const StageGame& game) {
  if (game.player_count() != 2) {
    throw std::invalid_argument("mixed and correlated cube tests need two players");
  }
}

// r_i(a, b) with a the player's own action and b the opponent's.
double own_payoff(const StageGame& game, int player, int own, int other) {
  const int profile[2] = {player == 0 ? own : other, player == 0 ? other : own};
  return game.payoff(game.profile_index(profile), player);
}

struct Range {
  double low;
  double high;
};

Range payoff_range(const StageGame& game, const SupportPattern& pattern, int player, int own) {
  Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (int b : pattern.actions[1 - player]) {
    const double v = own_payoff(game, player, own, b);
    r.low = std::min(r.low, v);
    r.high = std::max(r.high, v);
  }
  return r;
}

// Shared part of the mixed and correlated systems: constraints (1)-(4), plus
// the out-of-support continuation box of (5).
LinearSystem<double> mixed_core(const StageGame& game, const SupportPattern& pattern,
                                const CubeQuery& query,
                                const std::function<Range(int player)>& in_support_box) {
  require_two_players(game);
  const SupportLayout layout(game);
  const double gamma = query.gamma;
  const double side = query.cube.side;
  LinearSystem<double> sys;
  for (int i = 0; i < 2; ++i) {
    for (int a = 0; a < game.action_count(i); ++a) {
      const bool in = pattern.contains(i, a);
      sys.add_variable("alpha", 0.0, in ? 1.0 : 0.0);
    }
  }
  for (int i = 0; i < 2; ++i) {
    const Range box = in_support_box(i);
    for (int a = 0; a < game.action_count(i); ++a) {
      if (pattern.contains(i, a)) {
        sys.add_variable("w", box.low, box.high);
      } else {
        sys.add_variable("w", query.floor(i), query.floor(i) + side);
      }
    }
  }
  for (int i = 0; i < 2; ++i) {
    const double o = query.cube.origin(i);
    for (int a = 0; a < game.action_count(i); ++a) {
      // Out of support the utility only has to stay below the cube origin.
      if (pattern.contains(i, a)) {
        sys.add_variable("w'", o, o + side);
      } else {
        sys.add_variable("w'", std::nullopt, o);
      }
    }
  }
  for (int i = 0; i < 2; ++i) {
    std::vector<std::pair<int, double>> row;
    for (int a = 0; a < game.action_count(i); ++a) row.emplace_back(layout.alpha(i, a), 1.0);
    sys.add_constraint(std::move(row), Relation::Equal, 1.0);
  }
  for (int i = 0; i < 2; ++i) {
    const int j = 1 - i;
    for (int a = 0; a < game.action_count(i); ++a) {
      std::vector<std::pair<int, double>> row;
      row.emplace_back(layout.utility(i, a), 1.0);
      for (int b = 0; b < game.action_count(j); ++b) {
        const double coefficient = -(1.0 - gamma) * own_payoff(game, i, a, b);
        if (coefficient != 0.0) row.emplace_back(layout.alpha(j, b), coefficient);
      }
      if (gamma != 0.0) row.emplace_back(layout.continuation(i, a), -gamma);
      sys.add_constraint(std::move(row), Relation::Equal, 0.0);
    }
  }
  return sys;
}

// Necessary conditions shared by the mixed and correlated prefilters.
bool mixed_may_support(const StageGame& game, const SupportPattern& pattern,
                       const CubeQuery& query, const std::function<Range(int)>& in_support_box) {
  const double gamma = query.gamma;
  const double side = query.cube.side;
  for (int i = 0; i < 2; ++i) {
    const double o = query.cube.origin(i);
    const Range box = in_support_box(i);
    for (int a = 0; a < game.action_count(i); ++a) {
      const Range r = payoff_range(game, pattern, i, a);
      if (pattern.contains(i, a)) {
        // w'(a) in [o, o + l] with w(a) in the box.
        const double reach_low = (1.0 - gamma) * r.low + gamma * box.low;
        const double reach_high = (1.0 - gamma) * r.high + gamma * box.high;
        if (reach_high < o - kPrefilterSlack || reach_low > o + side + kPrefilterSlack) {
          return false;
        }
      } else if ((1.0 - gamma) * r.low + gamma * query.floor(i) > o + kPrefilterSlack) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

int SupportPattern::cardinality() const {
  int total = 0;
  for (const auto& s : actions) total += static_cast<int>(s.size());
  return total;
}

bool SupportPattern::contains(int player, int action) const {
  const auto& s = actions[player];
  return std::binary_search(s.begin(), s.end(), action);
}

std::vector<SupportPattern> enumerate_patterns(const StageGame& game) {
  require_two_players(game);
  std::vector<SupportPattern> out;
  for (const auto& s1 : nonempty_subsets(game.action_count(0))) {
    for (const auto& s2 : nonempty_subsets(game.action_count(1))) out.push_back({{s1, s2}});
  }
  std::sort(out.begin(), out.end(), [](const SupportPattern& a, const SupportPattern& b) {
    if (a.cardinality() != b.cardinality()) return a.cardinality() < b.cardinality();
    return a.actions < b.actions;
  });
  return out;
}

SupportLayout::SupportLayout(const StageGame& game) {
  for (int i = 0; i < game.player_count(); ++i) {
    offsets_.push_back(total_);
    total_ += game.action_count(i);
  }
}

Eigen::VectorXd SupportSolution::assignment(const StageGame& game) const {
  const SupportLayout layout(game);
  Eigen::VectorXd x(layout.variable_count());
  for (int i = 0; i < game.player_count(); ++i) {
    for (int a = 0; a < game.action_count(i); ++a) {
      x(layout.alpha(i, a)) = alpha.probabilities[i](a);
      x(layout.continuation(i, a)) = continuation[i](a);
      x(layout.utility(i, a)) = utility[i](a);
    }
  }
  return x;
}

SupportSolution solution_from_assignment(const StageGame& game, const SupportPattern& pattern,
                                         const Eigen::VectorXd& values) {
  const SupportLayout layout(game);
  SupportSolution s;
  s.pattern = pattern;
  for (int i = 0; i < game.player_count(); ++i) {
    const int m = game.action_count(i);
    Eigen::VectorXd p(m);
    Eigen::VectorXd w(m);
    Eigen::VectorXd u(m);
    for (int a = 0; a < m; ++a) {
      p(a) = std::max(0.0, values(layout.alpha(i, a)));
      w(a) = values(layout.continuation(i, a));
      u(a) = values(layout.utility(i, a));
    }
    p /= p.sum();
    s.alpha.probabilities.push_back(std::move(p));
    s.continuation.push_back(std::move(w));
    s.utility.push_back(std::move(u));
  }
  return s;
}

std::optional<SupportSearch> search_support_program(const SystemBuilder& builder,
                                                    const StageGame& game,
                                                    std::size_t first_pattern) {
  return search_support_program(builder, enumerate_patterns(game), game, first_pattern);
}

std::optional<SupportSearch> search_support_program(const SystemBuilder& builder,
                                                    const std::vector<SupportPattern>& patterns,
                                                    const StageGame& game,
                                                    std::size_t first_pattern) {
  for (std::size_t k = first_pattern; k < patterns.size(); ++k) {
    const std::optional<LinearSystem<double>> sys = builder(patterns[k]);
    if (!sys) continue;
    const LpResult<double> result = solve_feasibility(*sys);
    if (!result.feasible()) continue;
    return SupportSearch{solution_from_assignment(game, patterns[k], result.values), k};
  }
  return std::nullopt;
}

std::optional<SupportSolution> solve_support_program(const SystemBuilder& builder,
                                                     const StageGame& game) {
  if (auto found = search_support_program(builder, game)) return std::move(found->solution);
  return std::nullopt;
}

LinearSystem<double> cluster_system(const StageGame& game, const SupportPattern& pattern,
                                    const CubeQuery& query, const Cluster& cluster) {
  return mixed_core(game, pattern, query, [&](int i) {
    return Range{cluster.origin(i), cluster.origin(i) + cluster.lengths(i)};
  });
}

LinearSystem<double> hull_system(const StageGame& game, const SupportPattern& pattern,
                                 const CubeQuery& query, const HullRegion& region) {
  LinearSystem<double> sys = mixed_core(game, pattern, query, [&](int i) {
    return Range{region.low(i), region.high(i)};
  });
  const SupportLayout layout(game);
  for (int a : pattern.actions[0]) {
    for (int b : pattern.actions[1]) {
      for (const HalfPlane& p : region.planes) {
        std::vector<std::pair<int, double>> row;
        if (p.phi != 0.0) row.emplace_back(layout.continuation(0, a), p.phi);
        if (p.psi != 0.0) row.emplace_back(layout.continuation(1, b), p.psi);
        sys.add_constraint(std::move(row), Relation::LessEqual, p.lambda);
      }
    }
  }
  return sys;
}

bool cluster_may_support(const StageGame& game, const SupportPattern& pattern,
                         const CubeQuery& query, const Cluster& cluster) {
  return mixed_may_support(game, pattern, query, [&](int i) {
    return Range{cluster.origin(i), cluster.origin(i) + cluster.lengths(i)};
  });
}

bool hull_may_support(const StageGame& game, const SupportPattern& pattern,
                      const CubeQuery& query, const HullRegion& region) {
  return mixed_may_support(game, pattern, query,
                           [&](int i) { return Range{region.low(i), region.high(i)}; });
}

LinearSystem<double> pure_system(const StageGame& game, std::span<const int> profile,
                                 const CubeQuery& query, const Cluster& cluster) {
  const int n = game.player_count();
  const int k = game.profile_index(profile);
  const double gamma = query.gamma;
  LinearSystem<double> sys;
  for (int i = 0; i < n; ++i) {
    sys.add_variable("w", cluster.origin(i), cluster.origin(i) + cluster.lengths(i));
  }
  for (int i = 0; i < n; ++i) {
    sys.add_variable("w'", query.cube.origin(i), query.cube.origin(i) + query.cube.side);
  }
  std::vector<int> deviation(profile.begin(), profile.end());
  for (int i = 0; i < n; ++i) {
    const double r = game.payoff(k, i);
    // (1): w' - gamma w = (1 - gamma) r(a).
    std::vector<std::pair<int, double>> utility{{n + i, 1.0}};
    if (gamma != 0.0) utility.emplace_back(i, -gamma);
    sys.add_constraint(std::move(utility), Relation::Equal, (1.0 - gamma) * r);
    // (2): gamma w_i >= (1 - gamma)(r_i(BR, a_-i) - r_i(a)) + gamma w-underbar_i.
    double best = r;
    for (int a = 0; a < game.action_count(i); ++a) {
      deviation[i] = a;
      best = std::max(best, game.payoff(game.profile_index(deviation), i));
    }
    deviation[i] = profile[i];
    std::vector<std::pair<int, double>> incentive;
    if (gamma != 0.0) incentive.emplace_back(i, gamma);
    sys.add_constraint(std::move(incentive), Relation::GreaterEqual,
                       (1.0 - gamma) * (best - r) + gamma * query.floor(i));
  }
  return sys;
}

bool pure_may_support(const StageGame& game, std::span<const int> profile,
                      const CubeQuery& query, const Cluster& cluster) {
  const int n = game.player_count();
  const int k = game.profile_index(profile);
  const double gamma = query.gamma;
  std::vector<int> deviation(profile.begin(), profile.end());
  for (int i = 0; i < n; ++i) {
    const double r = game.payoff(k, i);
    double best = r;
    for (int a = 0; a < game.action_count(i); ++a) {
      deviation[i] = a;
      best = std::max(best, game.payoff(game.profile_index(deviation), i));
    }
    deviation[i] = profile[i];
    const double o = query.cube.origin(i);
    if (gamma == 0.0) {
      if (best - r > kPrefilterSlack) return false;
      if (r < o - kPrefilterSlack || r > o + query.cube.side + kPrefilterSlack) return false;
      continue;
    }
    // Interval of w_i allowed by the cluster, the incentive and the cube.
    const double incentive = (1.0 - gamma) * (best - r) / gamma + query.floor(i);
    const double low = std::max({cluster.origin(i), incentive, (o - (1.0 - gamma) * r) / gamma});
    const double high = std::min(cluster.origin(i) + cluster.lengths(i),
                                 (o + query.cube.side - (1.0 - gamma) * r) / gamma);
    if (low > high + kPrefilterSlack * (1.0 + 1.0 / gamma)) return false;
  }
  return true;
}

HullRegion make_hull_region(const std::vector<Eigen::Vector2d>& hull) {
  if (hull.empty()) throw std::invalid_argument("hull has no vertices");
  HullRegion region;
  region.planes = halfplanes_from_hull(hull);
  region.low = hull.front();
  region.high = hull.front();
  for (const Eigen::Vector2d& v : hull) {
    region.low = region.low.cwiseMin(v);
    region.high = region.high.cwiseMax(v);
  }
  return region;
}

}  // namespace spe
