#include "spe/io.hpp"
#include "spe/run.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

Eigen::VectorXd parse_point(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw CLI::ValidationError("--extract", "bad point '" + text + "'");
    values.push_back(v);
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

int replay_snapshot(const std::string& game_path, const std::string& snapshot_path) {
  const spe::GameDocument doc = spe::read_game_file(game_path);
  const spe::Snapshot snapshot = spe::read_snapshot_file(snapshot_path);
  const auto failed = spe::replay(doc.game, snapshot);
  std::cout << snapshot.cubes.size() << " certificates, " << failed.size() << " failed\n";
  for (std::size_t k : failed) std::cout << "failed cube " << k << '\n';
  return failed.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate subgame-perfect equilibrium payoffs of a repeated game"};
  spe::RunManifest manifest;
  std::string mode = "mixed";
  std::string completion = "bound";
  std::vector<std::string> extract;
  std::string replay_path;
  std::string game_path;
  std::string output;
  bool quiet = false;

  app.add_option("game", game_path, "Game file")->required()->check(CLI::ExistingFile);
  app.add_option("--gamma", manifest.solver.gamma, "Discount factor in [0, 1)");
  app.add_option("--epsilon", manifest.solver.epsilon, "Target precision");
  app.add_option("--mode", mode, "pure | mixed | correlated")->capture_default_str();
  app.add_option("--completion", completion, "bound | exact")->capture_default_str();
  app.add_option("--seed", manifest.seed, "Simulation seed")->capture_default_str();
  app.add_option("--out", output, "Output directory");
  app.add_option("--snapshot-every", manifest.snapshot_every,
                 "Snapshot cadence in passes (0: final set only)")
      ->capture_default_str();
  app.add_option("--extract", extract, "Target payoff v1,v2 for automaton extraction");
  app.add_flag("--svg", manifest.svg, "Also plot every written set");
  app.add_option("--max-generations", manifest.solver.max_generations, "Refinement guard")
      ->capture_default_str();
  app.add_option("--episodes", manifest.episodes, "Simulation episodes per automaton")
      ->capture_default_str();
  app.add_flag("--record-time", manifest.record_time, "Record wall-clock seconds");
  app.add_flag("--snapshot-pass", manifest.solver.snapshot,
               "Freeze the set during each pass (allows --threads)");
  app.add_option("--threads", manifest.solver.threads, "Workers for --snapshot-pass")
      ->capture_default_str();
  app.add_option("--replay", replay_path, "Re-verify the certificates of a snapshot file and exit");
  app.add_flag("--quiet", quiet, "No progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (!replay_path.empty()) return replay_snapshot(game_path, replay_path);
    if (output.empty()) {
      std::cerr << "--out is required\n";
      return spe::kExitError;
    }
    manifest.game_path = game_path;
    manifest.output = output;
    manifest.solver.mode = spe::parse_mode(mode);
    manifest.solver.completion = spe::parse_completion(completion);
    for (const auto& text : extract) manifest.extract.push_back(parse_point(text));
    const spe::RunResult result = spe::run(manifest, quiet ? nullptr : &std::cerr);
    return result.exit_code;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return spe::kExitError;
  }
}
