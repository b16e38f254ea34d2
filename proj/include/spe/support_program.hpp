#pragma once

#include "spe/game.hpp"
#include "spe/geometry.hpp"
#include "spe/linear_system.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <vector>

namespace spe {

/// Per-player sets of actions allowed positive probability; each set is
/// sorted and non-empty.
struct SupportPattern {
  std::vector<std::vector<int>> actions;

  int cardinality() const;
  bool contains(int player, int action) const;
  bool operator==(const SupportPattern&) const = default;
};

/// All patterns of a two-player game, by ascending cardinality and
/// lexicographically (per-player sorted lists) within one cardinality.
std::vector<SupportPattern> enumerate_patterns(const StageGame& game);

/// Variable numbering shared by the mixed and correlated systems: for each
/// player i and action a, the probability alpha_i(a), the continuation
/// w_i(a) and the utility w'_i(a).
class SupportLayout {
 public:
  explicit SupportLayout(const StageGame& game);

  int alpha(int player, int action) const { return offsets_[player] + action; }
  int continuation(int player, int action) const { return total_ + offsets_[player] + action; }
  int utility(int player, int action) const { return 2 * total_ + offsets_[player] + action; }
  int variable_count() const { return 3 * total_; }

 private:
  std::vector<int> offsets_;
  int total_ = 0;
};

struct SupportSolution {
  MixedProfile alpha;
  std::vector<Eigen::VectorXd> continuation;  // w_i(a_i)
  std::vector<Eigen::VectorXd> utility;       // w'_i(a_i)
  SupportPattern pattern;

  /// The values in SupportLayout order.
  Eigen::VectorXd assignment(const StageGame& game) const;
};

SupportSolution solution_from_assignment(const StageGame& game, const SupportPattern& pattern,
                                         const Eigen::VectorXd& values);

/// Returns the system for a pattern, or nothing when the pattern is known to
/// be infeasible without solving.
using SystemBuilder =
    std::function<std::optional<LinearSystem<double>>(const SupportPattern& pattern)>;

struct SupportSearch {
  SupportSolution solution;
  std::size_t pattern_index = 0;
};

/// Tries the patterns in enumeration order, starting at `first_pattern`, and
/// returns the first feasible one.
std::optional<SupportSearch> search_support_program(const SystemBuilder& builder,
                                                    const StageGame& game,
                                                    std::size_t first_pattern = 0);
std::optional<SupportSearch> search_support_program(const SystemBuilder& builder,
                                                    const std::vector<SupportPattern>& patterns,
                                                    const StageGame& game,
                                                    std::size_t first_pattern = 0);

std::optional<SupportSolution> solve_support_program(const SystemBuilder& builder,
                                                     const StageGame& game);

/// Continuations confined to a convex polygon (public correlation).
struct HullRegion {
  std::vector<HalfPlane> planes;
  Eigen::Vector2d low;  // bounding box of the polygon
  Eigen::Vector2d high;
};

struct CubeQuery {
  Hypercube cube;
  Eigen::VectorXd floor;  // w-underbar
  double gamma = 0.0;
};

/// Constraints of the mixed cube test for one cluster and one pattern.
LinearSystem<double> cluster_system(const StageGame& game, const SupportPattern& pattern,
                                    const CubeQuery& query, const Cluster& cluster);

/// Constraints of the correlated cube test for one pattern.
LinearSystem<double> hull_system(const StageGame& game, const SupportPattern& pattern,
                                 const CubeQuery& query, const HullRegion& region);

/// Interval-arithmetic necessary conditions; false means the pattern's
/// system is certainly infeasible.
bool cluster_may_support(const StageGame& game, const SupportPattern& pattern,
                         const CubeQuery& query, const Cluster& cluster);
bool hull_may_support(const StageGame& game, const SupportPattern& pattern,
                      const CubeQuery& query, const HullRegion& region);

/// Constraints of the pure cube test: variables w (indices 0..n-1) and
/// w' (indices n..2n-1) for one cluster and one pure profile.
LinearSystem<double> pure_system(const StageGame& game, std::span<const int> profile,
                                 const CubeQuery& query, const Cluster& cluster);
bool pure_may_support(const StageGame& game, std::span<const int> profile,
                      const CubeQuery& query, const Cluster& cluster);

HullRegion make_hull_region(const std::vector<Eigen::Vector2d>& hull);

}  // namespace spe
