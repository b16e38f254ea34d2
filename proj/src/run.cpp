#include "spe/run.hpp"

#include "spe/automaton.hpp"
#include "spe/io.hpp"
#include "spe/number_format.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

namespace spe {
namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RunError("cannot write " + path.string());
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out = open_output(path);
  out << text;
  if (!out) throw RunError("failed writing " + path.string());
}

std::string iteration_stem(int iteration) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "iteration_%04d", iteration);
  return buf;
}

std::string point_text(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index k = 0; k < v.size(); ++k) out += (k ? " " : "") + format_number(v(k));
  return out;
}

void write_manifest(const fs::path& path, const RunManifest& m, const std::string& game_name) {
  std::ofstream out = open_output(path);
  out << "game " << game_name << '\n'
      << "game_file " << m.game_path.filename().string() << '\n'
      << "gamma " << format_number(m.solver.gamma) << '\n'
      << "epsilon " << format_number(m.solver.epsilon) << '\n'
      << "mode " << to_string(m.solver.mode) << '\n'
      << "completion " << to_string(m.solver.completion) << '\n'
      << "max_generations " << m.solver.max_generations << '\n'
      << "snapshot_pass " << (m.solver.snapshot ? "yes" : "no") << '\n'
      << "seed " << m.seed << '\n'
      << "snapshot_every " << m.snapshot_every << '\n'
      << "episodes " << m.episodes << '\n';
  for (const auto& v : m.extract) out << "extract " << point_text(v) << '\n';
}

void write_set(const fs::path& dir, const std::string& stem, const Snapshot& snapshot, bool svg,
               const std::string& title) {
  {
    std::ofstream out = open_output(dir / (stem + ".txt"));
    write_snapshot(out, snapshot);
  }
  if (svg && snapshot.cubes.dimension() == 2) {
    write_text(dir / (stem + ".svg"), render_svg(snapshot.cubes, title));
  }
}

void write_trace(const fs::path& path, const SolveReport& report, bool record_time) {
  std::ofstream out = open_output(path);
  out << "iteration generation side cubes removed linear_programs";
  if (record_time) out << " seconds";
  out << '\n';
  for (const IterationSnapshot& s : report.iterations) {
    out << s.iteration << ' ' << s.generation << ' ' << format_number(s.side) << ' ' << s.cubes << ' '
        << s.removed << ' ' << s.linear_programs;
    if (record_time) out << ' ' << format_number(s.seconds);
    out << '\n';
  }
}

void write_performance(const fs::path& path, const RunManifest& m, const SolveReport& report) {
  std::ofstream out = open_output(path);
  out << "epsilon final_side iterations seconds status\n";
  const double side = report.iterations.empty() ? 0.0 : report.iterations.back().side;
  out << format_number(m.solver.epsilon) << ' ' << format_number(side) << ' '
      << report.iterations.size() << ' ' << (m.record_time ? format_number(report.seconds) : "-")
      << ' ' << to_string(report.status) << '\n';
}

// Value, deviation gains and a Monte Carlo estimate for one extracted automaton.
void write_analysis(const fs::path& path, const Automaton& automaton, const StageGame& game,
                    const RunManifest& m, const Eigen::VectorXd& target, std::uint64_t seed) {
  const double gamma = m.solver.gamma;
  const Eigen::VectorXd value = automaton_value(automaton, game, gamma);
  std::ofstream out = open_output(path);
  out << "target " << point_text(target) << '\n';
  out << "states " << automaton.state_count() << '\n';
  out << "value " << point_text(value) << '\n';
  out << "target_gap " << format_number((target - value).cwiseAbs().maxCoeff()) << '\n';
  for (int i = 0; i < game.player_count(); ++i) {
    const double deviation = best_deviation(automaton, game, i, gamma);
    out << "deviation " << i + 1 << ' ' << format_number(deviation) << " gain "
        << format_number(deviation - value(i)) << '\n';
  }
  if (m.episodes > 0) {
    const SimulationResult sim = simulate(automaton, game, gamma, seed, m.episodes);
    out << "simulation seed " << seed << " episodes " << m.episodes << " stages " << sim.stages << '\n';
    out << "simulation_mean " << point_text(sim.mean) << '\n';
    out << "simulation_se " << point_text(sim.standard_error) << '\n';
  }
}

}  // namespace

void validate(const RunManifest& m) {
  if (m.game_path.empty()) throw RunError("no game file given");
  if (!fs::is_regular_file(m.game_path)) throw RunError("game file not found: " + m.game_path.string());
  if (m.output.empty()) throw RunError("no output directory given");
  if (m.snapshot_every < 0) throw RunError("snapshot cadence must be non-negative");
  if (!(m.solver.gamma >= 0.0 && m.solver.gamma < 1.0)) throw RunError("gamma must lie in [0, 1)");
  if (!(m.solver.epsilon > 0.0)) throw RunError("epsilon must be positive");
  for (const auto& v : m.extract) {
    if (!v.allFinite()) throw RunError("extraction targets must be finite");
  }
}

RunResult run(const RunManifest& manifest, std::ostream* log) {
  validate(manifest);
  const GameDocument doc = read_game_file(manifest.game_path);
  const StageGame& game = doc.game;
  try {
    validate(manifest.solver, game);
  } catch (const std::invalid_argument& e) {
    throw RunError(e.what());
  }
  for (const auto& v : manifest.extract) {
    if (v.size() != game.player_count()) {
      throw RunError("extraction target " + point_text(v) + " needs " +
                     std::to_string(game.player_count()) + " coordinates");
    }
  }

  const fs::path dir = manifest.output;
  std::error_code ec;
  fs::create_directories(dir / "snapshots", ec);
  if (ec) throw RunError("cannot create " + dir.string() + ": " + ec.message());
  const std::string name = game.name().empty() ? manifest.game_path.stem().string() : game.name();
  write_manifest(dir / "manifest.txt", manifest, name);

  auto make_snapshot = [&](int iteration, const CubeSet& cubes,
                           const std::vector<SupportCertificate>& certificates) {
    Snapshot s;
    s.game = name;
    s.mode = manifest.solver.mode;
    s.gamma = manifest.solver.gamma;
    s.iteration = iteration;
    s.cubes = cubes;
    s.certificates = certificates;
    return s;
  };

  auto on_iteration = [&](const IterationSnapshot& snap, const CubeSet& cubes,
                          const std::vector<SupportCertificate>& certificates) {
    if (log) {
      *log << "iteration " << snap.iteration << ": generation " << snap.generation << ", "
           << snap.cubes << " cubes, " << snap.removed << " removed\n";
    }
    if (manifest.snapshot_every == 0 || snap.iteration % manifest.snapshot_every != 0) return;
    const std::string stem = iteration_stem(snap.iteration);
    write_set(dir / "snapshots", stem, make_snapshot(snap.iteration, cubes, certificates),
              manifest.svg, name + ", iteration " + std::to_string(snap.iteration));
  };

  RunResult result;
  result.report = solve(game, manifest.solver, on_iteration);
  const SolveReport& report = result.report;

  Snapshot final_set = make_snapshot(static_cast<int>(report.iterations.size()), report.cubes,
                                     report.certificates);
  final_set.status = report.status;
  write_set(dir, "final_set", final_set, manifest.svg, name + ", final set");
  write_trace(dir / "trace.txt", report, manifest.record_time);
  write_performance(dir / "performance.txt", manifest, report);

  switch (report.status) {
    case SolveStatus::Converged: result.exit_code = kExitConverged; break;
    case SolveStatus::Empty: result.exit_code = kExitEmpty; break;
    case SolveStatus::GenerationLimit: result.exit_code = kExitGenerationLimit; break;
  }
  if (log) {
    *log << to_string(report.status) << " after " << report.iterations.size() << " iterations, "
         << report.cubes.size() << " cubes of side " << format_number(report.cubes.side()) << '\n';
  }
  if (report.status == SolveStatus::Empty) return result;

  for (std::size_t k = 0; k < manifest.extract.size(); ++k) {
    const Eigen::VectorXd& target = manifest.extract[k];
    const std::string stem = "automaton_" + std::to_string(k + 1);
    Automaton automaton;
    try {
      automaton = extract_automaton(game, report.cubes, report.certificates, target);
    } catch (const std::invalid_argument& e) {
      write_text(dir / (stem + ".txt"), std::string("error ") + e.what() + '\n');
      if (log) *log << "extraction at " << point_text(target) << " failed: " << e.what() << '\n';
      result.exit_code = kExitError;
      continue;
    }
    {
      std::ofstream out = open_output(dir / (stem + ".txt"));
      write_automaton(out, automaton, game);
    }
    {
      std::ofstream out = open_output(dir / (stem + ".dot"));
      write_automaton_dot(out, automaton, game);
    }
    write_analysis(dir / (stem + "_analysis.txt"), automaton, game, manifest, target,
                   manifest.seed + k);
    if (log) *log << "wrote " << stem << " with " << automaton.state_count() << " states\n";
  }
  return result;
}

}  // namespace spe
