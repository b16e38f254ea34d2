#include "spe/game.hpp"

#include "spe/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spe {

StageGame::StageGame(std::vector<std::vector<std::string>> actions, Eigen::MatrixXd payoffs,
                     std::string name)
    : actions_(std::move(actions)), payoffs_(std::move(payoffs)), name_(std::move(name)) {
  if (actions_.size() < 2) throw std::invalid_argument("a stage game needs at least two players");
  long long profiles = 1;
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    if (actions_[i].empty()) {
      throw std::invalid_argument("player " + std::to_string(i + 1) + " has no actions");
    }
    profiles *= static_cast<long long>(actions_[i].size());
  }
  if (payoffs_.rows() != profiles || payoffs_.cols() != player_count()) {
    throw std::invalid_argument("payoff tensor shape does not match the action sets");
  }
  if (!payoffs_.allFinite()) throw std::invalid_argument("payoffs must be finite");
  strides_.assign(actions_.size(), 1);
  for (int i = player_count() - 2; i >= 0; --i) {
    strides_[i] = strides_[i + 1] * action_count(i + 1);
  }
}

int StageGame::profile_index(std::span<const int> profile) const {
  if (static_cast<int>(profile.size()) != player_count()) {
    throw std::invalid_argument("profile arity does not match player count");
  }
  int index = 0;
  for (int i = 0; i < player_count(); ++i) {
    if (profile[i] < 0 || profile[i] >= action_count(i)) {
      throw std::out_of_range("action index out of range");
    }
    index += profile[i] * strides_[i];
  }
  return index;
}

std::vector<int> StageGame::profile_at(int index) const {
  std::vector<int> profile(player_count());
  for (int i = 0; i < player_count(); ++i) {
    profile[i] = (index / strides_[i]) % action_count(i);
  }
  return profile;
}

Eigen::MatrixXd StageGame::payoff_matrix(int player) const {
  if (player_count() != 2) throw std::invalid_argument("payoff_matrix needs two players");
  Eigen::MatrixXd m(action_count(0), action_count(1));
  for (int a = 0; a < action_count(0); ++a) {
    for (int b = 0; b < action_count(1); ++b) m(a, b) = payoffs_(a * action_count(1) + b, player);
  }
  return m;
}

MixedProfile MixedProfile::pure(const StageGame& game, std::span<const int> profile) {
  MixedProfile alpha;
  for (int i = 0; i < game.player_count(); ++i) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(game.action_count(i));
    p(profile[i]) = 1.0;
    alpha.probabilities.push_back(std::move(p));
  }
  return alpha;
}

MixedProfile MixedProfile::uniform(const StageGame& game) {
  MixedProfile alpha;
  for (int i = 0; i < game.player_count(); ++i) {
    const int k = game.action_count(i);
    alpha.probabilities.push_back(Eigen::VectorXd::Constant(k, 1.0 / k));
  }
  return alpha;
}

std::vector<int> MixedProfile::support(int player) const {
  std::vector<int> actions;
  for (Eigen::Index a = 0; a < probabilities[player].size(); ++a) {
    if (probabilities[player](a) > kProbabilityTolerance) actions.push_back(static_cast<int>(a));
  }
  return actions;
}

double MixedProfile::probability(std::span<const int> profile) const {
  double p = 1.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) p *= probabilities[i](profile[i]);
  return p;
}

void validate(const MixedProfile& profile, const StageGame& game) {
  if (profile.player_count() != game.player_count()) {
    throw std::invalid_argument("mixed profile has the wrong number of players");
  }
  for (int i = 0; i < game.player_count(); ++i) {
    const Eigen::VectorXd& p = profile.probabilities[i];
    if (p.size() != game.action_count(i)) {
      throw std::invalid_argument("mixed action has the wrong number of entries");
    }
    if ((p.array() < -kProbabilityTolerance).any() ||
        std::abs(p.sum() - 1.0) > kProbabilityTolerance) {
      throw std::invalid_argument("mixed action is not a probability vector");
    }
  }
}

PayoffBounds payoff_bounds(const StageGame& game) {
  return {game.payoffs().minCoeff(), game.payoffs().maxCoeff()};
}

double expected_payoff(const StageGame& game, const MixedProfile& alpha, int player,
                       std::optional<int> fixed_action) {
  if (player < 0 || player >= game.player_count()) throw std::out_of_range("player index");
  if (fixed_action && (*fixed_action < 0 || *fixed_action >= game.action_count(player))) {
    throw std::out_of_range("action index");
  }
  double total = 0.0;
  for (int k = 0; k < game.profile_count(); ++k) {
    const std::vector<int> profile = game.profile_at(k);
    double p = 1.0;
    for (int j = 0; j < game.player_count() && p != 0.0; ++j) {
      if (j == player && fixed_action) {
        if (profile[j] != *fixed_action) p = 0.0;
      } else {
        p *= alpha.probabilities[j](profile[j]);
      }
    }
    if (p != 0.0) total += p * game.payoff(k, player);
  }
  return total;
}

BestResponse best_response(const StageGame& game, int player, const MixedProfile& opponents) {
  BestResponse best{0, expected_payoff(game, opponents, player, 0)};
  for (int a = 1; a < game.action_count(player); ++a) {
    const double value = expected_payoff(game, opponents, player, a);
    if (value > best.value + kPayoffTolerance) best = {a, value};
  }
  return best;
}

double minmax(const StageGame& game, int player) {
  if (game.player_count() != 2) {
    throw std::invalid_argument("mixed minmax is defined here for two-player games");
  }
  const int opponent = 1 - player;
  const Eigen::MatrixXd r = game.payoff_matrix(player);
  const PayoffBounds bounds = payoff_bounds(game);

  LinearSystem<double> lp;
  const int m = game.action_count(opponent);
  for (int b = 0; b < m; ++b) lp.add_variable("beta" + std::to_string(b), 0.0, 1.0);
  const int value = lp.add_variable("v", bounds.low, bounds.high);

  std::vector<std::pair<int, double>> simplex_row;
  for (int b = 0; b < m; ++b) simplex_row.emplace_back(b, 1.0);
  lp.add_constraint(std::move(simplex_row), Relation::Equal, 1.0);
  for (int a = 0; a < game.action_count(player); ++a) {
    std::vector<std::pair<int, double>> row;
    for (int b = 0; b < m; ++b) row.emplace_back(b, player == 0 ? r(a, b) : r(b, a));
    row.emplace_back(value, -1.0);
    lp.add_constraint(std::move(row), Relation::LessEqual, 0.0);
  }
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(lp.variable_count());
  cost(value) = 1.0;
  lp.set_objective(std::move(cost));

  const LpResult<double> result = solve_feasibility(lp);
  if (result.status != LpStatus::Optimal) throw std::runtime_error("minmax linear program failed");
  return result.objective;
}

double pure_minmax(const StageGame& game, int player) {
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < game.profile_count(); ++k) {
    std::vector<int> profile = game.profile_at(k);
    if (profile[player] != 0) continue;
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < game.action_count(player); ++a) {
      profile[player] = a;
      best = std::max(best, game.payoff(game.profile_index(profile), player));
    }
    worst = std::min(worst, best);
  }
  return worst;
}

double discounted_average(std::span<const double> prefix, std::span<const double> cycle,
                          double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (cycle.empty()) throw std::invalid_argument("cycle must be non-empty");
  double head = 0.0;
  double weight = 1.0;
  for (double v : prefix) {
    head += weight * v;
    weight *= gamma;
  }
  double loop = 0.0;
  double cycle_weight = 1.0;
  for (double v : cycle) {
    loop += cycle_weight * v;
    cycle_weight *= gamma;
  }
  // cycle_weight is now gamma^|cycle|.
  return (1.0 - gamma) * (head + weight * loop / (1.0 - cycle_weight));
}

}  // namespace spe
