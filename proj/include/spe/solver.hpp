#pragma once

#include "spe/game.hpp"
#include "spe/geometry.hpp"
#include "spe/support_program.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace spe {

enum class SolveMode { Pure, Mixed, Correlated };
enum class Completion { Bound, Exact };

std::string to_string(SolveMode mode);
std::string to_string(Completion completion);
SolveMode parse_mode(const std::string& text);
Completion parse_completion(const std::string& text);

struct SolverConfig {
  double gamma = 0.5;
  double epsilon = 0.1;
  SolveMode mode = SolveMode::Mixed;
  Completion completion = Completion::Bound;
  int max_generations = 30;
  /// Freeze C and w-underbar for a whole pass and remove at its end.
  bool snapshot = false;
  /// Worker threads for the snapshot variant; ignored otherwise.
  int threads = 1;
};

/// Throws std::invalid_argument on an unusable configuration.
void validate(const SolverConfig& config, const StageGame& game);

/// Why a cube was kept: the strategy and continuations found for it, plus
/// the context they were checked against.
///
/// For pure certificates the pattern holds one action per player; the
/// continuation of every in-pattern action is the common continuation w,
/// and out-of-pattern entries hold w-underbar.
struct SupportCertificate {
  SolveMode mode = SolveMode::Pure;
  Hypercube cube;
  Eigen::VectorXd floor;
  double gamma = 0.0;
  SupportSolution solution;
  std::optional<Cluster> cluster;            // pure and mixed
  std::shared_ptr<const HullRegion> hull;    // correlated
};

/// Largest constraint violation of the certificate's system at its stored
/// solution.
double certificate_violation(const StageGame& game, const SupportCertificate& certificate);
bool verify_certificate(const StageGame& game, const SupportCertificate& certificate);

std::optional<SupportCertificate> cube_supported_pure(const Hypercube& cube,
                                                      const std::vector<Cluster>& clusters,
                                                      const Eigen::VectorXd& floor,
                                                      const StageGame& game, double gamma);
std::optional<SupportCertificate> cube_supported_pure(const Hypercube& cube, const CubeSet& cubes,
                                                      const Eigen::VectorXd& floor,
                                                      const StageGame& game, double gamma);

std::optional<SupportCertificate> cube_supported_mixed(const Hypercube& cube,
                                                       const std::vector<Cluster>& clusters,
                                                       const Eigen::VectorXd& floor,
                                                       const StageGame& game, double gamma);
std::optional<SupportCertificate> cube_supported_mixed(const Hypercube& cube, const CubeSet& cubes,
                                                       const Eigen::VectorXd& floor,
                                                       const StageGame& game, double gamma);

/// `first_pattern` skips patterns already known to be infeasible; the index
/// of the pattern found is written to `pattern_index` when given.
std::optional<SupportCertificate> cube_supported_correlated(
    const Hypercube& cube, std::shared_ptr<const HullRegion> hull, const Eigen::VectorXd& floor,
    const StageGame& game, double gamma, std::size_t first_pattern = 0,
    std::size_t* pattern_index = nullptr);
std::optional<SupportCertificate> cube_supported_correlated(const Hypercube& cube,
                                                            const CubeSet& cubes,
                                                            const StageGame& game, double gamma);

/// Completion in bound mode: l <= epsilon (1 - gamma) / 2.
bool completion_bound_met(double side, const SolverConfig& config);

/// Per-cube completion: bound mode uses the side-length threshold; exact
/// mode checks both epsilon conditions on the automaton started at each cube.
std::vector<bool> cubes_completed(const StageGame& game, const CubeSet& cubes,
                                  const std::vector<SupportCertificate>& certificates,
                                  const SolverConfig& config);
bool cube_completed(const StageGame& game, std::size_t cube, const CubeSet& cubes,
                    const std::vector<SupportCertificate>& certificates,
                    const SolverConfig& config);

enum class SolveStatus { Converged, Empty, GenerationLimit };
std::string to_string(SolveStatus status);

struct IterationSnapshot {
  int iteration = 0;
  int generation = 0;
  double side = 0.0;
  std::size_t cubes = 0;
  std::size_t removed = 0;
  std::size_t linear_programs = 0;
  double seconds = 0.0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::Converged;
  CubeSet cubes;
  /// Aligned with `cubes`; filled from the final pass.
  std::vector<SupportCertificate> certificates;
  std::vector<IterationSnapshot> iterations;
  double seconds = 0.0;

  bool empty() const { return status == SolveStatus::Empty; }
};

/// Called after every pass with the surviving cubes and their certificates.
using IterationCallback = std::function<void(const IterationSnapshot&, const CubeSet&,
                                             const std::vector<SupportCertificate>&)>;

SolveReport solve(const StageGame& game, const SolverConfig& config,
                  const IterationCallback& on_iteration = {});

/// Generation count at which bound-mode completion must hold.
int generation_bound(const PayoffBounds& bounds, const SolverConfig& config);

}  // namespace spe
