#pragma once

#include "spe/game.hpp"

#include <random>

namespace fixtures {

inline spe::StageGame two_by_two(const char* name, std::vector<std::string> a1,
                                 std::vector<std::string> a2,
                                 std::initializer_list<double> flat) {
  const Eigen::Index rows = static_cast<Eigen::Index>(a1.size() * a2.size());
  Eigen::MatrixXd payoffs(rows, 2);
  auto it = flat.begin();
  for (Eigen::Index k = 0; k < rows; ++k) {
    payoffs(k, 0) = *it++;
    payoffs(k, 1) = *it++;
  }
  return spe::StageGame({std::move(a1), std::move(a2)}, payoffs, name);
}

inline spe::StageGame prisoners_dilemma() {
  return two_by_two("pd", {"C", "D"}, {"C", "D"}, {2, 2, -1, 3, 3, -1, 0, 0});
}

inline spe::StageGame battle_of_sexes() {
  return two_by_two("bos", {"O", "F"}, {"O", "F"}, {1, 2, 0, 0, 0, 0, 2, 1});
}

inline spe::StageGame rock_paper_scissors() {
  return two_by_two("rps", {"R", "P", "S"}, {"R", "P", "S"},
                    {0, 0, -1, 1, 1, -1, 1, -1, 0, 0, -1, 1, -1, 1, 1, -1, 0, 0});
}

inline spe::StageGame matching_pennies() {
  return two_by_two("mp", {"H", "T"}, {"H", "T"}, {1, -1, -1, 1, -1, 1, 1, -1});
}

inline spe::StageGame constant_game() {
  return two_by_two("const", {"a", "b"}, {"a", "b"}, {5, 5, 5, 5, 5, 5, 5, 5});
}

/// Integer payoffs in [-range, range] keep exact comparisons meaningful.
inline spe::StageGame random_game(std::mt19937_64& rng, int m1, int m2, int range = 5) {
  std::uniform_int_distribution<int> payoff(-range, range);
  std::vector<std::string> a1;
  std::vector<std::string> a2;
  for (int a = 0; a < m1; ++a) a1.push_back("a" + std::to_string(a));
  for (int b = 0; b < m2; ++b) a2.push_back("b" + std::to_string(b));
  Eigen::MatrixXd payoffs(m1 * m2, 2);
  for (Eigen::Index k = 0; k < payoffs.rows(); ++k) {
    payoffs(k, 0) = payoff(rng);
    payoffs(k, 1) = payoff(rng);
  }
  return spe::StageGame({a1, a2}, payoffs, "random");
}

inline spe::MixedProfile random_mix(std::mt19937_64& rng, const spe::StageGame& game) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  spe::MixedProfile alpha;
  for (int i = 0; i < game.player_count(); ++i) {
    Eigen::VectorXd p(game.action_count(i));
    for (Eigen::Index a = 0; a < p.size(); ++a) p(a) = u(rng) + 1e-3;
    alpha.probabilities.push_back(p / p.sum());
  }
  return alpha;
}

}  // namespace fixtures
