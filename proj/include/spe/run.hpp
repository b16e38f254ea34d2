#pragma once

#include "spe/solver.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace spe {

struct RunManifest {
  std::filesystem::path game_path;
  SolverConfig solver;
  std::uint64_t seed = 1;
  std::filesystem::path output;
  /// Write a snapshot after every k-th pass; 0 writes only the final set.
  int snapshot_every = 1;
  /// Target payoff points to extract automata for.
  std::vector<Eigen::VectorXd> extract;
  bool svg = false;
  /// Wall-clock seconds make the artifacts differ between runs, so they are opt-in.
  bool record_time = false;
  std::uint64_t episodes = 10000;
};

/// Invalid manifest values or an unusable output directory.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int {
  kExitConverged = 0,
  kExitError = 1,
  kExitEmpty = 2,
  kExitGenerationLimit = 3,
};

struct RunResult {
  int exit_code = kExitError;
  SolveReport report;
};

void validate(const RunManifest& manifest);

/// Solves, writes all artifacts under `manifest.output` and reports progress
/// on `log` when given.
RunResult run(const RunManifest& manifest, std::ostream* log = nullptr);

}  // namespace spe
