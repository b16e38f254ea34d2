#pragma once

#include "spe/game.hpp"
#include "spe/geometry.hpp"
#include "spe/solver.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spe {

/// A malformed document; `what()` names the source and line.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct GameDocument {
  StageGame game;
  std::string source;  // free-text provenance, may be empty
};

GameDocument parse_game_document(std::istream& in, const std::string& source_name = "<input>");
StageGame parse_game(std::istream& in, const std::string& source_name = "<input>");
StageGame parse_game(const std::string& text);
GameDocument read_game_file(const std::filesystem::path& path);
void write_game(std::ostream& out, const StageGame& game, const std::string& source = {});

/// A cube set with the certificate of every cube, as written after a pass.
struct Snapshot {
  std::string game;
  SolveMode mode = SolveMode::Mixed;
  double gamma = 0.0;
  int iteration = 0;
  std::optional<SolveStatus> status;  // set on final sets only
  CubeSet cubes;
  std::vector<SupportCertificate> certificates;
};

void write_snapshot(std::ostream& out, const Snapshot& snapshot);
Snapshot read_snapshot(std::istream& in, const std::string& source_name = "<input>");
Snapshot read_snapshot_file(const std::filesystem::path& path);

/// Indices of cubes whose stored certificate fails to re-verify.
std::vector<std::size_t> replay(const StageGame& game, const Snapshot& snapshot);

/// Plot of a two-dimensional cube set over its initial cube.
std::string render_svg(const CubeSet& cubes, const std::string& title);

}  // namespace spe
