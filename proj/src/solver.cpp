#include "spe/solver.hpp"

#include "spe/automaton.hpp"
#include "spe/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace spe {
namespace {

constexpr double kCertificateTolerance = 1e-7;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

SupportCertificate pure_certificate(const StageGame& game, std::span<const int> profile,
                                    const CubeQuery& query, const Cluster& cluster,
                                    const Eigen::VectorXd& values) {
  const int n = game.player_count();
  SupportCertificate cert;
  cert.mode = SolveMode::Pure;
  cert.cube = query.cube;
  cert.floor = query.floor;
  cert.gamma = query.gamma;
  cert.cluster = cluster;
  SupportSolution& s = cert.solution;
  s.alpha = MixedProfile::pure(game, profile);
  std::vector<int> deviation(profile.begin(), profile.end());
  for (int i = 0; i < n; ++i) {
    const int m = game.action_count(i);
    s.pattern.actions.push_back({profile[i]});
    Eigen::VectorXd w = Eigen::VectorXd::Constant(m, query.floor(i));
    Eigen::VectorXd u(m);
    for (int a = 0; a < m; ++a) {
      deviation[i] = a;
      u(a) = (1.0 - query.gamma) * game.payoff(game.profile_index(deviation), i) +
             query.gamma * query.floor(i);
    }
    deviation[i] = profile[i];
    w(profile[i]) = values(i);
    u(profile[i]) = values(n + i);
    s.continuation.push_back(std::move(w));
    s.utility.push_back(std::move(u));
  }
  return cert;
}

SupportCertificate mixed_certificate(SolveMode mode, const CubeQuery& query,
                                     SupportSolution solution) {
  SupportCertificate cert;
  cert.mode = mode;
  cert.cube = query.cube;
  cert.floor = query.floor;
  cert.gamma = query.gamma;
  cert.solution = std::move(solution);
  return cert;
}

const std::vector<SupportPattern>& patterns_for(const StageGame& game) {
  // Small per-thread cache keyed by the action counts.
  thread_local std::vector<int> key;
  thread_local std::vector<SupportPattern> patterns;
  std::vector<int> counts{game.action_count(0), game.action_count(1)};
  if (counts != key) {
    patterns = enumerate_patterns(game);
    key = counts;
  }
  return patterns;
}

// Per-dimension minimum lattice coordinate of the live cells, updated as
// cells are removed.
class FloorTracker {
 public:
  explicit FloorTracker(const CubeSet& cubes) : cubes_(&cubes) {
    const int n = cubes.dimension();
    low_.assign(n, 0);
    counts_.resize(n);
    first_.assign(n, 0);
    for (int d = 0; d < n; ++d) {
      std::int32_t lo = cubes.cell(0)[d];
      std::int32_t hi = lo;
      for (std::size_t k = 1; k < cubes.size(); ++k) {
        lo = std::min(lo, cubes.cell(k)[d]);
        hi = std::max(hi, cubes.cell(k)[d]);
      }
      low_[d] = lo;
      counts_[d].assign(static_cast<std::size_t>(hi - lo) + 1, 0);
      for (std::size_t k = 0; k < cubes.size(); ++k) ++counts_[d][cubes.cell(k)[d] - lo];
    }
  }

  void remove(std::size_t k) {
    for (int d = 0; d < cubes_->dimension(); ++d) {
      --counts_[d][cubes_->cell(k)[d] - low_[d]];
      while (first_[d] + 1 < counts_[d].size() && counts_[d][first_[d]] == 0) ++first_[d];
    }
  }

  Eigen::VectorXd floor() const {
    const int n = cubes_->dimension();
    Eigen::VectorXd out(n);
    for (int d = 0; d < n; ++d) {
      out(d) = cubes_->base_origin()(d) +
               cubes_->side() * static_cast<double>(low_[d] + static_cast<std::int32_t>(first_[d]));
    }
    return out;
  }

 private:
  const CubeSet* cubes_;
  std::vector<std::int32_t> low_;
  std::vector<std::vector<int>> counts_;
  std::vector<std::size_t> first_;
};

std::uint64_t pack_point(std::int64_t x, std::int64_t y) {
  return (static_cast<std::uint64_t>(x + (1LL << 31)) << 32) |
         static_cast<std::uint64_t>(y + (1LL << 31));
}

// Convex hull of the live cells, rebuilt only when a removed cell touches
// one of its vertices.
class HullTracker {
 public:
  HullTracker(const CubeSet& cubes, const std::vector<bool>& alive)
      : cubes_(&cubes), alive_(&alive) {
    rebuild();
  }

  void remove(std::size_t k) {
    const auto c = cubes_->cell(k);
    for (int dx = 0; dx < 2; ++dx) {
      for (int dy = 0; dy < 2; ++dy) {
        if (vertices_.count(pack_point(c[0] + dx, c[1] + dy))) {
          stale_ = true;
          return;
        }
      }
    }
  }

  const std::shared_ptr<const HullRegion>& region() {
    if (stale_) rebuild();
    return region_;
  }

 private:
  void rebuild() {
    const std::vector<Eigen::Vector2d> hull = hull_vertices(*cubes_, *alive_);
    region_ = std::make_shared<const HullRegion>(make_hull_region(hull));
    vertices_.clear();
    for (const Eigen::Vector2d& v : hull) {
      const Eigen::Vector2d t = (v - cubes_->base_origin()) / cubes_->side();
      vertices_.insert(pack_point(std::llround(t.x()), std::llround(t.y())));
    }
    stale_ = false;
  }

  const CubeSet* cubes_;
  const std::vector<bool>* alive_;
  std::shared_ptr<const HullRegion> region_;
  std::unordered_set<std::uint64_t> vertices_;
  bool stale_ = false;
};

CubeSet live_subset(const CubeSet& cubes, const std::vector<bool>& alive) {
  CubeSet out = cubes;
  out.retain(alive);
  return out;
}

// Cached witness for the correlated test: within one generation the
// constraints only tighten, so earlier patterns stay infeasible.
struct CorrelatedMemo {
  std::size_t pattern = 0;
  std::optional<SupportSolution> solution;
};

// Everything a single cube test needs; built either live (updated after
// each removal) or frozen for a snapshot pass.
struct PassContext {
  Eigen::VectorXd floor;
  std::vector<Cluster> clusters;
  std::shared_ptr<const HullRegion> hull;
};

std::optional<SupportCertificate> test_cube(const StageGame& game, const SolverConfig& config,
                                            const Hypercube& cube, const PassContext& context,
                                            CorrelatedMemo* memo, std::size_t& linear_programs) {
  const double gamma = config.gamma;
  switch (config.mode) {
    case SolveMode::Pure: {
      const CubeQuery query{cube, context.floor, gamma};
      for (const Cluster& cluster : context.clusters) {
        for (int k = 0; k < game.profile_count(); ++k) {
          const std::vector<int> profile = game.profile_at(k);
          if (!pure_may_support(game, profile, query, cluster)) continue;
          ++linear_programs;
          const LpResult<double> result = solve_feasibility(pure_system(game, profile, query, cluster));
          if (result.feasible()) return pure_certificate(game, profile, query, cluster, result.values);
        }
      }
      return std::nullopt;
    }
    case SolveMode::Mixed: {
      const CubeQuery query{cube, context.floor, gamma};
      for (const Cluster& cluster : context.clusters) {
        const SystemBuilder builder =
            [&](const SupportPattern& pattern) -> std::optional<LinearSystem<double>> {
          if (!cluster_may_support(game, pattern, query, cluster)) return std::nullopt;
          ++linear_programs;
          return cluster_system(game, pattern, query, cluster);
        };
        if (auto found = search_support_program(builder, patterns_for(game), game)) {
          SupportCertificate cert = mixed_certificate(SolveMode::Mixed, query, std::move(found->solution));
          cert.cluster = cluster;
          return cert;
        }
      }
      return std::nullopt;
    }
    case SolveMode::Correlated: {
      const CubeQuery query{cube, context.floor, gamma};
      std::size_t first = 0;
      if (memo) {
        first = memo->pattern;
        if (memo->solution) {
          const SupportPattern& pattern = memo->solution->pattern;
          const LinearSystem<double> sys = hull_system(game, pattern, query, *context.hull);
          if (max_violation(sys, memo->solution->assignment(game)) <= kCertificateTolerance) {
            SupportCertificate cert = mixed_certificate(SolveMode::Correlated, query, *memo->solution);
            cert.hull = context.hull;
            return cert;
          }
        }
      }
      std::size_t index = 0;
      const SystemBuilder builder =
          [&](const SupportPattern& pattern) -> std::optional<LinearSystem<double>> {
        if (!hull_may_support(game, pattern, query, *context.hull)) return std::nullopt;
        ++linear_programs;
        return hull_system(game, pattern, query, *context.hull);
      };
      auto found = search_support_program(builder, patterns_for(game), game, first);
      if (!found) {
        if (memo) {
          memo->pattern = patterns_for(game).size();
          memo->solution.reset();
        }
        return std::nullopt;
      }
      index = found->pattern_index;
      if (memo) {
        memo->pattern = index;
        memo->solution = found->solution;
      }
      SupportCertificate cert = mixed_certificate(SolveMode::Correlated, query, std::move(found->solution));
      cert.hull = context.hull;
      return cert;
    }
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(SolveMode mode) {
  switch (mode) {
    case SolveMode::Pure: return "pure";
    case SolveMode::Mixed: return "mixed";
    case SolveMode::Correlated: return "correlated";
  }
  return "unknown";
}

std::string to_string(Completion completion) {
  return completion == Completion::Bound ? "bound" : "exact";
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::Empty: return "empty";
    case SolveStatus::GenerationLimit: return "generation-limit";
  }
  return "unknown";
}

SolveMode parse_mode(const std::string& text) {
  if (text == "pure") return SolveMode::Pure;
  if (text == "mixed" || text == "mixed-clusters") return SolveMode::Mixed;
  if (text == "correlated" || text == "mixed-correlated") return SolveMode::Correlated;
  throw std::invalid_argument("unknown mode '" + text + "'");
}

Completion parse_completion(const std::string& text) {
  if (text == "bound") return Completion::Bound;
  if (text == "exact") return Completion::Exact;
  throw std::invalid_argument("unknown completion '" + text + "'");
}

void validate(const SolverConfig& config, const StageGame& game) {
  if (!(config.gamma >= 0.0 && config.gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1)");
  }
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  if (config.mode != SolveMode::Pure && game.player_count() != 2) {
    throw std::invalid_argument("mixed and correlated modes need two players");
  }
  if (config.max_generations < 0) throw std::invalid_argument("max_generations must be >= 0");
  if (config.threads < 1) throw std::invalid_argument("threads must be >= 1");
}

double certificate_violation(const StageGame& game, const SupportCertificate& cert) {
  const CubeQuery query{cert.cube, cert.floor, cert.gamma};
  const SupportSolution& s = cert.solution;
  switch (cert.mode) {
    case SolveMode::Pure: {
      if (!cert.cluster) throw std::invalid_argument("pure certificate without a cluster");
      const int n = game.player_count();
      std::vector<int> profile(n);
      Eigen::VectorXd x(2 * n);
      for (int i = 0; i < n; ++i) {
        if (s.pattern.actions[i].size() != 1) throw std::invalid_argument("pure pattern");
        profile[i] = s.pattern.actions[i][0];
        x(i) = s.continuation[i](profile[i]);
        x(n + i) = s.utility[i](profile[i]);
      }
      return max_violation(pure_system(game, profile, query, *cert.cluster), x);
    }
    case SolveMode::Mixed:
      if (!cert.cluster) throw std::invalid_argument("mixed certificate without a cluster");
      return max_violation(cluster_system(game, s.pattern, query, *cert.cluster),
                           s.assignment(game));
    case SolveMode::Correlated:
      if (!cert.hull) throw std::invalid_argument("correlated certificate without a hull");
      return max_violation(hull_system(game, s.pattern, query, *cert.hull), s.assignment(game));
  }
  return 0.0;
}

bool verify_certificate(const StageGame& game, const SupportCertificate& certificate) {
  return certificate_violation(game, certificate) <= kCertificateTolerance;
}

std::optional<SupportCertificate> cube_supported_pure(const Hypercube& cube,
                                                      const std::vector<Cluster>& clusters,
                                                      const Eigen::VectorXd& floor,
                                                      const StageGame& game, double gamma) {
  SolverConfig config;
  config.gamma = gamma;
  config.mode = SolveMode::Pure;
  std::size_t count = 0;
  return test_cube(game, config, cube, PassContext{floor, clusters, nullptr}, nullptr, count);
}

std::optional<SupportCertificate> cube_supported_pure(const Hypercube& cube, const CubeSet& cubes,
                                                      const Eigen::VectorXd& floor,
                                                      const StageGame& game, double gamma) {
  return cube_supported_pure(cube, get_clusters(cubes), floor, game, gamma);
}

std::optional<SupportCertificate> cube_supported_mixed(const Hypercube& cube,
                                                       const std::vector<Cluster>& clusters,
                                                       const Eigen::VectorXd& floor,
                                                       const StageGame& game, double gamma) {
  SolverConfig config;
  config.gamma = gamma;
  config.mode = SolveMode::Mixed;
  std::size_t count = 0;
  return test_cube(game, config, cube, PassContext{floor, clusters, nullptr}, nullptr, count);
}

std::optional<SupportCertificate> cube_supported_mixed(const Hypercube& cube, const CubeSet& cubes,
                                                       const Eigen::VectorXd& floor,
                                                       const StageGame& game, double gamma) {
  return cube_supported_mixed(cube, get_clusters(cubes), floor, game, gamma);
}

std::optional<SupportCertificate> cube_supported_correlated(
    const Hypercube& cube, std::shared_ptr<const HullRegion> hull, const Eigen::VectorXd& floor,
    const StageGame& game, double gamma, std::size_t first_pattern, std::size_t* pattern_index) {
  SolverConfig config;
  config.gamma = gamma;
  config.mode = SolveMode::Correlated;
  CorrelatedMemo memo{first_pattern, std::nullopt};
  std::size_t count = 0;
  auto cert = test_cube(game, config, cube, PassContext{floor, {}, std::move(hull)}, &memo, count);
  if (cert && pattern_index) *pattern_index = memo.pattern;
  return cert;
}

std::optional<SupportCertificate> cube_supported_correlated(const Hypercube& cube,
                                                            const CubeSet& cubes,
                                                            const StageGame& game, double gamma) {
  auto hull = std::make_shared<const HullRegion>(make_hull_region(hull_vertices(cubes)));
  return cube_supported_correlated(cube, std::move(hull), min_origin(cubes), game, gamma);
}

bool completion_bound_met(double side, const SolverConfig& config) {
  return side <= config.epsilon * (1.0 - config.gamma) / 2.0;
}

std::vector<bool> cubes_completed(const StageGame& game, const CubeSet& cubes,
                                  const std::vector<SupportCertificate>& certificates,
                                  const SolverConfig& config) {
  if (config.completion == Completion::Bound) {
    return std::vector<bool>(cubes.size(), completion_bound_met(cubes.side(), config));
  }
  const Automaton automaton = full_automaton(game, cubes, certificates);
  const Eigen::MatrixXd values = automaton_values(automaton, game, config.gamma);
  std::vector<bool> done(cubes.size(), true);
  for (int i = 0; i < game.player_count(); ++i) {
    const Eigen::VectorXd deviation = deviation_values(automaton, game, i, config.gamma);
    for (std::size_t k = 0; k < cubes.size(); ++k) {
      const double shortfall = cubes.origin(k, i) - values(k, i);
      const double gain = deviation(k) - values(k, i);
      if (shortfall > config.epsilon || gain > config.epsilon) done[k] = false;
    }
  }
  return done;
}

bool cube_completed(const StageGame& game, std::size_t cube, const CubeSet& cubes,
                    const std::vector<SupportCertificate>& certificates,
                    const SolverConfig& config) {
  if (config.completion == Completion::Bound) return completion_bound_met(cubes.side(), config);
  return cubes_completed(game, cubes, certificates, config).at(cube);
}

int generation_bound(const PayoffBounds& bounds, const SolverConfig& config) {
  const double side = bounds.high > bounds.low ? bounds.high - bounds.low : 1.0;
  int g = 0;
  while (!completion_bound_met(std::ldexp(side, -g), config)) ++g;
  return g;
}

SolveReport solve(const StageGame& game, const SolverConfig& config,
                  const IterationCallback& on_iteration) {
  validate(config, game);
  const auto start = Clock::now();
  SolveReport report;
  CubeSet cubes = initial_cube(payoff_bounds(game), game.player_count());
  std::vector<CorrelatedMemo> memos(cubes.size());
  int iteration = 0;

  while (true) {
    const auto pass_start = Clock::now();
    const std::size_t count = cubes.size();
    std::vector<bool> alive(count, true);
    std::vector<std::optional<SupportCertificate>> found(count);
    std::size_t removed = 0;
    std::size_t linear_programs = 0;

    if (config.snapshot) {
      PassContext frozen;
      frozen.floor = min_origin(cubes);
      if (config.mode == SolveMode::Correlated) {
        frozen.hull = std::make_shared<const HullRegion>(make_hull_region(hull_vertices(cubes)));
      } else {
        frozen.clusters = get_clusters(cubes);
      }
      const int workers = std::max(1, std::min<int>(config.threads, static_cast<int>(count)));
      std::vector<std::size_t> lps(workers, 0);
      auto work = [&](int w) {
        for (std::size_t k = w; k < count; k += workers) {
          CorrelatedMemo* memo = config.mode == SolveMode::Correlated ? &memos[k] : nullptr;
          found[k] = test_cube(game, config, cubes.cube(k), frozen, memo, lps[w]);
        }
      };
      if (workers == 1) {
        work(0);
      } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
      }
      for (std::size_t v : lps) linear_programs += v;
      for (std::size_t k = 0; k < count; ++k) {
        if (!found[k]) {
          alive[k] = false;
          ++removed;
        }
      }
    } else {
      FloorTracker floor(cubes);
      std::optional<HullTracker> hull;
      if (config.mode == SolveMode::Correlated) hull.emplace(cubes, alive);
      PassContext context;
      bool clusters_stale = true;
      for (std::size_t k = 0; k < count; ++k) {
        context.floor = floor.floor();
        if (hull) {
          context.hull = hull->region();
        } else if (clusters_stale) {
          context.clusters = get_clusters(removed == 0 ? cubes : live_subset(cubes, alive));
          clusters_stale = false;
        }
        CorrelatedMemo* memo = config.mode == SolveMode::Correlated ? &memos[k] : nullptr;
        found[k] = test_cube(game, config, cubes.cube(k), context, memo, linear_programs);
        if (found[k]) continue;
        alive[k] = false;
        ++removed;
        if (removed == count) break;
        floor.remove(k);
        if (hull) hull->remove(k);
        clusters_stale = true;
      }
    }

    cubes.retain(alive);
    std::vector<SupportCertificate> certificates;
    std::vector<CorrelatedMemo> kept_memos;
    certificates.reserve(cubes.size());
    for (std::size_t k = 0; k < count; ++k) {
      if (!alive[k]) continue;
      certificates.push_back(std::move(*found[k]));
      kept_memos.push_back(std::move(memos[k]));
    }
    memos = std::move(kept_memos);

    IterationSnapshot snap;
    snap.iteration = ++iteration;
    snap.generation = cubes.generation();
    snap.side = cubes.side();
    snap.cubes = cubes.size();
    snap.removed = removed;
    snap.linear_programs = linear_programs;
    snap.seconds = seconds_since(pass_start);
    report.iterations.push_back(snap);
    if (on_iteration) on_iteration(snap, cubes, certificates);

    if (cubes.empty()) {
      report.status = SolveStatus::Empty;
      report.cubes = std::move(cubes);
      break;
    }
    if (removed > 0) continue;

    const std::vector<bool> done = cubes_completed(game, cubes, certificates, config);
    if (std::all_of(done.begin(), done.end(), [](bool b) { return b; })) {
      report.status = SolveStatus::Converged;
      report.cubes = std::move(cubes);
      report.certificates = std::move(certificates);
      break;
    }
    if (cubes.generation() >= config.max_generations) {
      report.status = SolveStatus::GenerationLimit;
      report.cubes = std::move(cubes);
      report.certificates = std::move(certificates);
      break;
    }
    cubes = split_all(cubes);
    memos.assign(cubes.size(), CorrelatedMemo{});
  }
  report.seconds = seconds_since(start);
  return report;
}

}  // namespace spe
