#pragma once

#include "spe/game.hpp"
#include "spe/geometry.hpp"
#include "spe/solver.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace spe {

/// Tolerance for matching a continuation point to a cube of W.
inline constexpr double kLocateTolerance = 1e-7;

struct Outcome {
  double weight = 1.0;
  int target = 0;
};

/// Where play moves after one pure profile; several outcomes form a lottery
/// resolved by the public signal omega.
struct Transition {
  std::vector<Outcome> outcomes;
};

struct AutomatonState {
  Hypercube cube;
  MixedProfile action;
  /// Indexed by pure profile index; defined for every profile.
  std::vector<Transition> transitions;
  /// Per player: whether each action belongs to the certified support.
  std::vector<std::vector<bool>> in_support;
};

struct PunishmentProfile {
  std::vector<int> states;  // c^i
  Eigen::VectorXd floor;    // w-underbar^i_i per player
};

struct Automaton {
  std::vector<AutomatonState> states;
  int initial = 0;
  PunishmentProfile punishment;

  int state_count() const { return static_cast<int>(states.size()); }
};

/// Strategy extraction by worklist from the cube containing `v`: one state
/// per reachable cube, decisions and continuations from stored certificates.
/// Throws std::invalid_argument when `v` lies outside W.
Automaton extract_automaton(const StageGame& game, const CubeSet& cubes,
                            const std::vector<SupportCertificate>& certificates,
                            const Eigen::VectorXd& v);

/// Same construction with every cube as a state (state k is cube k); the
/// value at each state equals that of the automaton extracted from it.
Automaton full_automaton(const StageGame& game, const CubeSet& cubes,
                         const std::vector<SupportCertificate>& certificates);

/// Per-state payoff profiles (rows are states) of following the automaton.
Eigen::MatrixXd automaton_values(const Automaton& automaton, const StageGame& game, double gamma);
Eigen::VectorXd automaton_value(const Automaton& automaton, const StageGame& game, double gamma);

/// Per-state value of `player` best-responding to the automaton, obtained by
/// value iteration.
Eigen::VectorXd deviation_values(const Automaton& automaton, const StageGame& game, int player,
                                 double gamma);
double best_deviation(const Automaton& automaton, const StageGame& game, int player,
                      double gamma);

struct LotteryBranch {
  double weight = 0.0;
  Eigen::Vector2d point;
};

/// Writes `point` as a convex combination of at most three hull vertices of
/// W by fan triangulation from the first hull vertex. Throws
/// std::invalid_argument when the point lies outside the hull.
std::vector<LotteryBranch> decompose_into_vertices(const Eigen::Vector2d& point,
                                                   const std::vector<Eigen::Vector2d>& hull,
                                                   double tolerance = 1e-9);
std::vector<LotteryBranch> decompose_into_vertices(const Eigen::Vector2d& point,
                                                   const CubeSet& cubes);

struct SimulationResult {
  Eigen::VectorXd mean;
  Eigen::VectorXd standard_error;
  std::uint64_t stages = 0;
};

/// Monte Carlo play: each episode continues after every stage with
/// probability gamma. Episode payoff sums estimate u / (1 - gamma), so the
/// returned mean and standard error are scaled by (1 - gamma).
SimulationResult simulate(const Automaton& automaton, const StageGame& game, double gamma,
                          std::uint64_t seed, std::uint64_t episodes);

void write_automaton(std::ostream& out, const Automaton& automaton, const StageGame& game);
void write_automaton_dot(std::ostream& out, const Automaton& automaton, const StageGame& game);

}  // namespace spe
