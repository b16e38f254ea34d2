#pragma once

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spe {

/// Support membership threshold for mixed actions.
inline constexpr double kProbabilityTolerance = 1e-9;
/// Absolute tolerance for payoff comparisons.
inline constexpr double kPayoffTolerance = 1e-9;

/// A normal-form stage game.
///
/// Payoffs are stored with one row per pure action profile and one column per
/// player. Profiles are numbered row-major over the players' action lists:
/// the last player's action varies fastest.
class StageGame {
 public:
  StageGame(std::vector<std::vector<std::string>> actions, Eigen::MatrixXd payoffs,
            std::string name = {});

  int player_count() const { return static_cast<int>(actions_.size()); }
  int action_count(int player) const { return static_cast<int>(actions_.at(player).size()); }
  const std::vector<std::string>& actions(int player) const { return actions_.at(player); }
  int profile_count() const { return static_cast<int>(payoffs_.rows()); }
  const std::string& name() const { return name_; }

  int profile_index(std::span<const int> profile) const;
  std::vector<int> profile_at(int index) const;

  double payoff(int profile, int player) const { return payoffs_(profile, player); }
  Eigen::VectorXd payoff_vector(int profile) const { return payoffs_.row(profile).transpose(); }
  /// Rows are profiles, columns are players.
  const Eigen::MatrixXd& payoffs() const { return payoffs_; }

  /// For two-player games: the |A_1| x |A_2| matrix of `player`'s payoffs.
  Eigen::MatrixXd payoff_matrix(int player) const;

 private:
  std::vector<std::vector<std::string>> actions_;
  Eigen::MatrixXd payoffs_;
  std::vector<int> strides_;
  std::string name_;
};

/// Independent mixed actions, one probability vector per player.
struct MixedProfile {
  std::vector<Eigen::VectorXd> probabilities;

  static MixedProfile pure(const StageGame& game, std::span<const int> profile);
  static MixedProfile uniform(const StageGame& game);

  int player_count() const { return static_cast<int>(probabilities.size()); }
  bool in_support(int player, int action) const {
    return probabilities[player](action) > kProbabilityTolerance;
  }
  std::vector<int> support(int player) const;
  /// Probability of the pure profile under independent mixing.
  double probability(std::span<const int> profile) const;
};

/// Throws std::invalid_argument unless `profile` is a valid mixture for `game`.
void validate(const MixedProfile& profile, const StageGame& game);

struct PayoffBounds {
  double low;
  double high;
};

PayoffBounds payoff_bounds(const StageGame& game);

/// r_i(alpha) when `fixed_action` is empty, otherwise r_i(a_i | alpha_{-i}):
/// the expectation over the other players' mixtures only.
double expected_payoff(const StageGame& game, const MixedProfile& alpha, int player,
                       std::optional<int> fixed_action = std::nullopt);

struct BestResponse {
  int action;
  double value;
};

/// Best pure reply of `player` to the others' mixtures in `opponents` (the
/// player's own entry is ignored). Ties go to the smallest action index.
BestResponse best_response(const StageGame& game, int player, const MixedProfile& opponents);

/// Mixed minmax value of `player` in a two-player game, computed as the value
/// of the zero-sum linear program in which the opponent minimizes.
double minmax(const StageGame& game, int player);

/// Minmax over pure opponent profiles; defined for any number of players.
double pure_minmax(const StageGame& game, int player);

/// (1 - gamma) * sum_t gamma^t v_t for the stream prefix . cycle . cycle ...
double discounted_average(std::span<const double> prefix, std::span<const double> cycle,
                          double gamma);

}  // namespace spe
