#include "spe/automaton.hpp"

#include "spe/number_format.hpp"

#include <Eigen/LU>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>

namespace spe {
namespace {

// Direct factorization below this many states, fixed-point iteration above.
constexpr int kDirectSolveLimit = 4000;

std::vector<int> punishment_states(const CubeSet& cubes) {
  const int n = cubes.dimension();
  std::vector<int> states(n, 0);
  for (int i = 0; i < n; ++i) {
    for (std::size_t k = 1; k < cubes.size(); ++k) {
      if (cubes.cell(k)[i] < cubes.cell(states[i])[i]) states[i] = static_cast<int>(k);
    }
  }
  return states;
}

// Builds states whose targets are cube indices of `cubes`.
class StateBuilder {
 public:
  StateBuilder(const StageGame& game, const CubeSet& cubes,
               const std::vector<SupportCertificate>& certificates)
      : game_(game), cubes_(cubes), certificates_(certificates), locator_(cubes),
        punishment_(punishment_states(cubes)) {
    if (cubes.empty()) throw std::invalid_argument("automaton needs a non-empty set");
    if (certificates.size() != cubes.size()) {
      throw std::invalid_argument("one certificate per cube is required");
    }
    for (int p = 0; p < game.profile_count(); ++p) profiles_.push_back(game.profile_at(p));
  }

  const std::vector<int>& punishment() const { return punishment_; }
  const CubeLocator& locator() const { return locator_; }

  AutomatonState build(std::size_t k) {
    const SupportCertificate& cert = certificates_[k];
    const SupportSolution& s = cert.solution;
    const int n = game_.player_count();
    AutomatonState state;
    state.cube = cubes_.cube(k);
    state.action = s.alpha;
    state.in_support.resize(n);
    for (int i = 0; i < n; ++i) {
      state.in_support[i].resize(game_.action_count(i));
      for (int a = 0; a < game_.action_count(i); ++a) {
        state.in_support[i][a] = s.pattern.contains(i, a);
      }
    }
    state.transitions.resize(profiles_.size());
    Eigen::VectorXd point(n);
    for (std::size_t p = 0; p < profiles_.size(); ++p) {
      const std::vector<int>& profile = profiles_[p];
      int deviator = -1;
      for (int i = 0; i < n && deviator < 0; ++i) {
        if (!state.in_support[i][profile[i]]) deviator = i;
      }
      Transition& t = state.transitions[p];
      if (deviator >= 0) {
        t.outcomes.push_back({1.0, punishment_[deviator]});
        continue;
      }
      for (int i = 0; i < n; ++i) point(i) = s.continuation[i](profile[i]);
      if (auto found = locator_.locate(point, kLocateTolerance)) {
        t.outcomes.push_back({1.0, static_cast<int>(*found)});
        continue;
      }
      if (n != 2) throw std::runtime_error("continuation point lies outside the set");
      for (const LotteryBranch& branch :
           decompose_into_vertices(Eigen::Vector2d(point(0), point(1)), hull(), kLocateTolerance)) {
        auto target = locator_.locate(Eigen::VectorXd(branch.point), kLocateTolerance);
        if (!target) throw std::runtime_error("hull vertex lies outside the set");
        t.outcomes.push_back({branch.weight, static_cast<int>(*target)});
      }
    }
    return state;
  }

 private:
  const std::vector<Eigen::Vector2d>& hull() {
    if (!hull_) hull_ = hull_vertices(cubes_);
    return *hull_;
  }

  const StageGame& game_;
  const CubeSet& cubes_;
  const std::vector<SupportCertificate>& certificates_;
  CubeLocator locator_;
  std::vector<int> punishment_;
  std::vector<std::vector<int>> profiles_;
  std::optional<std::vector<Eigen::Vector2d>> hull_;
};

PunishmentProfile punishment_profile(const CubeSet& cubes, const std::vector<int>& states) {
  PunishmentProfile out;
  out.states = states;
  out.floor = min_origin(cubes);
  return out;
}

// Profile probabilities under each state's decision, skipping zeros.
struct Play {
  std::vector<std::vector<std::pair<int, double>>> weights;  // per state
};

Play profile_weights(const Automaton& automaton, const StageGame& game) {
  std::vector<std::vector<int>> profiles;
  for (int p = 0; p < game.profile_count(); ++p) profiles.push_back(game.profile_at(p));
  Play play;
  play.weights.resize(automaton.states.size());
  for (std::size_t s = 0; s < automaton.states.size(); ++s) {
    for (int p = 0; p < game.profile_count(); ++p) {
      const double w = automaton.states[s].action.probability(profiles[p]);
      if (w > 0.0) play.weights[s].emplace_back(p, w);
    }
  }
  return play;
}

int sample_index(const Eigen::VectorXd& probabilities, double u) {
  double cumulative = 0.0;
  int last = 0;
  for (int a = 0; a < probabilities.size(); ++a) {
    if (probabilities(a) <= 0.0) continue;
    cumulative += probabilities(a);
    last = a;
    if (u < cumulative) return a;
  }
  return last;
}

std::string action_label(const AutomatonState& state, const StageGame& game) {
  std::string out = "(";
  for (int i = 0; i < game.player_count(); ++i) {
    if (i) out += ",";
    const std::vector<int> support = state.action.support(i);
    if (support.size() == 1) {
      out += game.actions(i)[support[0]];
      continue;
    }
    for (std::size_t k = 0; k < support.size(); ++k) {
      if (k) out += "+";
      out += format_number(state.action.probabilities[i](support[k])) + game.actions(i)[support[k]];
    }
  }
  return out + ")";
}

std::string profile_label(const StageGame& game, int profile) {
  const std::vector<int> actions = game.profile_at(profile);
  std::string out;
  for (int i = 0; i < game.player_count(); ++i) {
    if (i) out += ",";
    out += game.actions(i)[actions[i]];
  }
  return out;
}

}  // namespace

Automaton extract_automaton(const StageGame& game, const CubeSet& cubes,
                            const std::vector<SupportCertificate>& certificates,
                            const Eigen::VectorXd& v) {
  StateBuilder builder(game, cubes, certificates);
  const auto start = builder.locator().locate(v, kLocateTolerance);
  if (!start) throw std::invalid_argument("target payoff lies outside the set");

  std::map<int, int> numbering;  // cube index -> state index
  std::deque<int> worklist;
  auto visit = [&](int cube) {
    auto [it, inserted] = numbering.emplace(cube, static_cast<int>(numbering.size()));
    if (inserted) worklist.push_back(cube);
    return it->second;
  };
  visit(static_cast<int>(*start));

  Automaton automaton;
  std::vector<AutomatonState> built;
  auto drain = [&] {
    while (!worklist.empty()) {
      const int cube = worklist.front();
      worklist.pop_front();
      AutomatonState state = builder.build(cube);
      for (Transition& t : state.transitions) {
        for (Outcome& o : t.outcomes) o.target = visit(o.target);
      }
      built.push_back(std::move(state));
    }
  };
  drain();
  // Punishment states are kept even when no deviation can reach them.
  for (int s : builder.punishment()) visit(s);
  drain();
  automaton.states = std::move(built);
  automaton.initial = 0;
  automaton.punishment = punishment_profile(cubes, builder.punishment());
  for (int& s : automaton.punishment.states) s = numbering.at(s);
  return automaton;
}

Automaton full_automaton(const StageGame& game, const CubeSet& cubes,
                         const std::vector<SupportCertificate>& certificates) {
  StateBuilder builder(game, cubes, certificates);
  Automaton automaton;
  automaton.states.reserve(cubes.size());
  for (std::size_t k = 0; k < cubes.size(); ++k) automaton.states.push_back(builder.build(k));
  automaton.punishment = punishment_profile(cubes, builder.punishment());
  return automaton;
}

Eigen::MatrixXd automaton_values(const Automaton& automaton, const StageGame& game, double gamma) {
  const int states = automaton.state_count();
  const int n = game.player_count();
  const Play play = profile_weights(automaton, game);

  Eigen::MatrixXd stage = Eigen::MatrixXd::Zero(states, n);
  std::vector<Eigen::Triplet<double>> entries;
  for (int s = 0; s < states; ++s) {
    for (const auto& [p, w] : play.weights[s]) {
      stage.row(s) += w * game.payoffs().row(p);
      for (const Outcome& o : automaton.states[s].transitions[p].outcomes) {
        entries.emplace_back(s, o.target, w * o.weight);
      }
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> next(states, states);
  next.setFromTriplets(entries.begin(), entries.end());
  const Eigen::MatrixXd rhs = (1.0 - gamma) * stage;

  if (states <= kDirectSolveLimit) {
    Eigen::SparseMatrix<double> system(states, states);
    system.setIdentity();
    system -= gamma * Eigen::SparseMatrix<double>(next);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(system);
    if (lu.info() == Eigen::Success) {
      Eigen::MatrixXd values = lu.solve(rhs);
      const Eigen::MatrixXd residual = values - gamma * (next * values) - rhs;
      if (lu.info() == Eigen::Success && residual.cwiseAbs().maxCoeff() <= 1e-9) return values;
    }
  }
  // Contraction with modulus gamma: stop once the a-posteriori error bound is tiny.
  Eigen::MatrixXd values = stage;
  while (true) {
    Eigen::MatrixXd updated = rhs + gamma * (next * values);
    const double change = (updated - values).cwiseAbs().maxCoeff();
    values = std::move(updated);
    if (change * gamma <= 1e-11 * (1.0 - gamma)) break;
  }
  return values;
}

Eigen::VectorXd automaton_value(const Automaton& automaton, const StageGame& game, double gamma) {
  return automaton_values(automaton, game, gamma).row(automaton.initial).transpose();
}

Eigen::VectorXd deviation_values(const Automaton& automaton, const StageGame& game, int player,
                                 double gamma) {
  if (player < 0 || player >= game.player_count()) throw std::out_of_range("player index");
  const int states = automaton.state_count();
  const int own = game.action_count(player);

  // Per state and own action: (profile, opponents' probability) pairs.
  struct Entry {
    int profile;
    double weight;
  };
  std::vector<std::vector<std::vector<Entry>>> table(states, std::vector<std::vector<Entry>>(own));
  for (int p = 0; p < game.profile_count(); ++p) {
    const std::vector<int> profile = game.profile_at(p);
    for (int s = 0; s < states; ++s) {
      const MixedProfile& alpha = automaton.states[s].action;
      double w = 1.0;
      for (int j = 0; j < game.player_count() && w > 0.0; ++j) {
        if (j != player) w *= alpha.probabilities[j](profile[j]);
      }
      if (w > 0.0) table[s][profile[player]].push_back({p, w});
    }
  }

  Eigen::VectorXd values = automaton_values(automaton, game, gamma).col(player);
  Eigen::VectorXd updated(states);
  const double tolerance = 1e-9 * (1.0 - gamma);
  while (true) {
    for (int s = 0; s < states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < own; ++a) {
        double q = 0.0;
        for (const Entry& e : table[s][a]) {
          double future = 0.0;
          for (const Outcome& o : automaton.states[s].transitions[e.profile].outcomes) {
            future += o.weight * values(o.target);
          }
          q += e.weight * ((1.0 - gamma) * game.payoff(e.profile, player) + gamma * future);
        }
        best = std::max(best, q);
      }
      updated(s) = best;
    }
    const double change = (updated - values).cwiseAbs().maxCoeff();
    values.swap(updated);
    if (change <= tolerance) break;
  }
  return values;
}

double best_deviation(const Automaton& automaton, const StageGame& game, int player,
                      double gamma) {
  return deviation_values(automaton, game, player, gamma)(automaton.initial);
}

std::vector<LotteryBranch> decompose_into_vertices(const Eigen::Vector2d& point,
                                                   const std::vector<Eigen::Vector2d>& hull,
                                                   double tolerance) {
  if (hull.empty()) throw std::invalid_argument("empty hull");
  auto finish = [&](std::vector<LotteryBranch> branches) {
    std::erase_if(branches, [&](const LotteryBranch& b) { return b.weight <= tolerance; });
    double total = 0.0;
    for (const LotteryBranch& b : branches) total += b.weight;
    for (LotteryBranch& b : branches) b.weight /= total;
    return branches;
  };
  if (hull.size() == 1) {
    if ((point - hull[0]).cwiseAbs().maxCoeff() > tolerance) {
      throw std::invalid_argument("point lies outside the hull");
    }
    return {{1.0, hull[0]}};
  }
  if (hull.size() == 2) {
    const Eigen::Vector2d d = hull[1] - hull[0];
    const double t = std::clamp((point - hull[0]).dot(d) / d.squaredNorm(), 0.0, 1.0);
    if ((hull[0] + t * d - point).cwiseAbs().maxCoeff() > tolerance) {
      throw std::invalid_argument("point lies outside the hull");
    }
    return finish({{1.0 - t, hull[0]}, {t, hull[1]}});
  }
  for (const HalfPlane& h : halfplanes_from_hull(hull)) {
    if (h.slack(point.x(), point.y()) < -tolerance) {
      throw std::invalid_argument("point lies outside the hull");
    }
  }
  // Fan from hull[0]; pick the triangle with the least negative coordinate.
  std::vector<LotteryBranch> best;
  double best_floor = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j + 1 < hull.size(); ++j) {
    Eigen::Matrix2d edges;
    edges.col(0) = hull[j] - hull[0];
    edges.col(1) = hull[j + 1] - hull[0];
    const Eigen::Vector2d beta = edges.partialPivLu().solve(point - hull[0]);
    const double w0 = 1.0 - beta.sum();
    const double floor = std::min({w0, beta(0), beta(1)});
    if (floor > best_floor) {
      best_floor = floor;
      best = {{std::max(w0, 0.0), hull[0]},
              {std::max(beta(0), 0.0), hull[j]},
              {std::max(beta(1), 0.0), hull[j + 1]}};
    }
    if (floor >= 0.0) break;
  }
  return finish(std::move(best));
}

std::vector<LotteryBranch> decompose_into_vertices(const Eigen::Vector2d& point,
                                                   const CubeSet& cubes) {
  return decompose_into_vertices(point, hull_vertices(cubes));
}

SimulationResult simulate(const Automaton& automaton, const StageGame& game, double gamma,
                          std::uint64_t seed, std::uint64_t episodes) {
  if (episodes == 0) throw std::invalid_argument("episodes must be positive");
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  const int n = game.player_count();
  std::vector<int> profile(n);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sum_squares = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd episode(n);
  SimulationResult result;
  for (std::uint64_t e = 0; e < episodes; ++e) {
    episode.setZero();
    int state = automaton.initial;
    while (true) {
      const AutomatonState& q = automaton.states[state];
      for (int i = 0; i < n; ++i) profile[i] = sample_index(q.action.probabilities[i], uniform());
      const int p = game.profile_index(profile);
      episode += game.payoffs().row(p).transpose();
      ++result.stages;
      if (uniform() >= gamma) break;
      const std::vector<Outcome>& outcomes = q.transitions[p].outcomes;
      state = outcomes.back().target;
      if (outcomes.size() > 1) {
        const double omega = 1.0 - uniform();  // in (0, 1]
        double cumulative = 0.0;
        for (const Outcome& o : outcomes) {
          cumulative += o.weight;
          if (omega <= cumulative) {
            state = o.target;
            break;
          }
        }
      }
    }
    sum += episode;
    sum_squares += episode.cwiseProduct(episode);
  }
  const double count = static_cast<double>(episodes);
  const Eigen::VectorXd mean = sum / count;
  Eigen::VectorXd variance = Eigen::VectorXd::Zero(n);
  if (episodes > 1) {
    variance = ((sum_squares - count * mean.cwiseProduct(mean)) / (count - 1.0)).cwiseMax(0.0);
  }
  result.mean = (1.0 - gamma) * mean;
  result.standard_error = (1.0 - gamma) * (variance / count).cwiseSqrt();
  return result;
}

void write_automaton(std::ostream& out, const Automaton& automaton, const StageGame& game) {
  const int n = game.player_count();
  out << "automaton " << (game.name().empty() ? "unnamed" : game.name()) << '\n';
  out << "players " << n << '\n';
  out << "states " << automaton.state_count() << '\n';
  out << "initial " << automaton.initial << '\n';
  out << "punishment";
  for (int s : automaton.punishment.states) out << ' ' << s;
  out << '\n' << "floor";
  for (int i = 0; i < automaton.punishment.floor.size(); ++i) {
    out << ' ' << format_number(automaton.punishment.floor(i));
  }
  out << '\n';
  for (int s = 0; s < automaton.state_count(); ++s) {
    const AutomatonState& q = automaton.states[s];
    out << "state " << s << '\n' << "  cube";
    for (int i = 0; i < q.cube.origin.size(); ++i) out << ' ' << format_number(q.cube.origin(i));
    out << ' ' << format_number(q.cube.side) << '\n';
    for (int i = 0; i < n; ++i) {
      out << "  action " << i;
      for (int a = 0; a < game.action_count(i); ++a) {
        out << ' ' << format_number(q.action.probabilities[i](a));
      }
      out << '\n';
    }
    for (std::size_t p = 0; p < q.transitions.size(); ++p) {
      out << "  on " << profile_label(game, static_cast<int>(p));
      for (const Outcome& o : q.transitions[p].outcomes) {
        out << ' ' << o.target << ':' << format_number(o.weight);
      }
      out << '\n';
    }
  }
}

void write_automaton_dot(std::ostream& out, const Automaton& automaton, const StageGame& game) {
  out << "digraph automaton {\n  rankdir=LR;\n  node [shape=circle];\n";
  out << "  start [shape=point];\n  start -> q" << automaton.initial << ";\n";
  for (int s = 0; s < automaton.state_count(); ++s) {
    const AutomatonState& q = automaton.states[s];
    out << "  q" << s << " [label=\"q" << s << "\\n" << action_label(q, game) << "\"];\n";
  }
  for (int s = 0; s < automaton.state_count(); ++s) {
    const AutomatonState& q = automaton.states[s];
    // One edge per (target, weight), labelled with every profile taking it.
    std::map<std::pair<int, std::string>, std::string> edges;
    for (std::size_t p = 0; p < q.transitions.size(); ++p) {
      const auto& outcomes = q.transitions[p].outcomes;
      for (const Outcome& o : outcomes) {
        const std::string weight = outcomes.size() > 1 ? format_number(o.weight) : "";
        std::string& label = edges[{o.target, weight}];
        if (!label.empty()) label += "\\n";
        label += profile_label(game, static_cast<int>(p));
      }
    }
    for (const auto& [key, label] : edges) {
      out << "  q" << s << " -> q" << key.first << " [label=\"" << label;
      if (!key.second.empty()) out << "\\np=" << key.second;
      out << "\"];\n";
    }
  }
  out << "}\n";
}

}  // namespace spe
