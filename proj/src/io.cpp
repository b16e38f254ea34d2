#include "spe/io.hpp"

#include "spe/number_format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

namespace spe {
namespace {

constexpr const char* kSnapshotMagic = "spe-snapshot";
constexpr int kSnapshotVersion = 1;

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

// Reads non-blank lines with comments removed, tracking line numbers.
class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  bool next(std::vector<std::string>& words) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      raw_ = line;
      words = split_words(strip_comment(line));
      if (!words.empty()) return true;
    }
    return false;
  }

  // The current line after its keyword, comments kept out.
  std::string rest_after_keyword() const {
    std::string text = strip_comment(raw_);
    const auto start = text.find_first_not_of(" \t");
    const auto gap = text.find_first_of(" \t", start);
    if (gap == std::string::npos) return {};
    const auto value = text.find_first_not_of(" \t", gap);
    if (value == std::string::npos) return {};
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(value, end - value + 1);
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw FormatError(source_, line_, message);
  }

  double number(const std::string& word, const std::string& what) const {
    double value = 0.0;
    const char* end = word.data() + word.size();
    const auto result = std::from_chars(word.data(), end, value);
    if (result.ec != std::errc() || result.ptr != end || !std::isfinite(value)) {
      fail(what + ": '" + word + "' is not a finite number");
    }
    return value;
  }

  long long integer(const std::string& word, const std::string& what) const {
    long long value = 0;
    const char* end = word.data() + word.size();
    const auto result = std::from_chars(word.data(), end, value);
    if (result.ec != std::errc() || result.ptr != end) {
      fail(what + ": '" + word + "' is not an integer");
    }
    return value;
  }

  void expect(const std::vector<std::string>& words, const std::string& keyword,
              std::size_t count) const {
    if (words[0] != keyword) fail("expected '" + keyword + "', found '" + words[0] + "'");
    if (words.size() != count + 1) {
      fail("'" + keyword + "' takes " + std::to_string(count) + " value(s), found " +
           std::to_string(words.size() - 1));
    }
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  std::string source_;
  std::string raw_;
  int line_ = 0;
};

std::string profile_name(const std::vector<std::vector<std::string>>& actions,
                         const std::vector<int>& profile) {
  std::string out = "(";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (i) out += ",";
    out += actions[i][profile[i]];
  }
  return out + ")";
}

// Row-major successor: the last player's action varies fastest.
bool advance(std::vector<int>& profile, const std::vector<std::vector<std::string>>& actions) {
  for (int i = static_cast<int>(profile.size()) - 1; i >= 0; --i) {
    if (++profile[i] < static_cast<int>(actions[i].size())) return true;
    profile[i] = 0;
  }
  return false;
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) out << ' ' << format_number(v(k));
}

// Per-player groups separated by '|'.
void write_groups(std::ostream& out, const char* keyword, const std::vector<Eigen::VectorXd>& groups) {
  out << "  " << keyword;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (i) out << " |";
    write_vector(out, groups[i]);
  }
  out << '\n';
}

std::vector<std::vector<std::string>> split_groups(const LineReader& reader,
                                                   const std::vector<std::string>& words,
                                                   int players) {
  std::vector<std::vector<std::string>> groups(1);
  for (std::size_t k = 1; k < words.size(); ++k) {
    if (words[k] == "|") {
      groups.emplace_back();
    } else {
      groups.back().push_back(words[k]);
    }
  }
  if (static_cast<int>(groups.size()) != players) {
    reader.fail("'" + words[0] + "' needs " + std::to_string(players) + " groups separated by '|'");
  }
  return groups;
}

std::vector<Eigen::VectorXd> read_groups(const LineReader& reader,
                                         const std::vector<std::string>& words,
                                         const std::vector<int>& sizes) {
  const auto groups = split_groups(reader, words, static_cast<int>(sizes.size()));
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (static_cast<int>(groups[i].size()) != sizes[i]) {
      reader.fail("'" + words[0] + "' group " + std::to_string(i + 1) + " needs " +
                  std::to_string(sizes[i]) + " values");
    }
    Eigen::VectorXd v(sizes[i]);
    for (int a = 0; a < sizes[i]; ++a) v(a) = reader.number(groups[i][a], words[0]);
    out.push_back(std::move(v));
  }
  return out;
}

Eigen::VectorXd read_numbers(const LineReader& reader, const std::vector<std::string>& words,
                             std::size_t first, std::size_t count) {
  if (words.size() != first + count) {
    reader.fail("'" + words[0] + "' takes " + std::to_string(count + first - 1) + " value(s)");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(count));
  for (std::size_t k = 0; k < count; ++k) v(k) = reader.number(words[first + k], words[0]);
  return v;
}

std::vector<std::string> next_line(LineReader& reader, const std::string& expected) {
  std::vector<std::string> words;
  if (!reader.next(words)) reader.fail("unexpected end of input, expected '" + expected + "'");
  if (words[0] != expected) reader.fail("expected '" + expected + "', found '" + words[0] + "'");
  return words;
}

}  // namespace

FormatError::FormatError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

GameDocument parse_game_document(std::istream& in, const std::string& source_name) {
  LineReader reader(in, source_name);
  std::string name;
  std::string source;
  int players = 0;
  std::vector<std::vector<std::string>> actions;
  std::vector<std::string> words;
  bool in_payoffs = false;
  while (!in_payoffs && reader.next(words)) {
    const std::string& key = words[0];
    if (key == "name") {
      name = reader.rest_after_keyword();
    } else if (key == "source") {
      source = reader.rest_after_keyword();
    } else if (key == "players") {
      reader.expect(words, "players", 1);
      const long long n = reader.integer(words[1], "players");
      if (n < 2 || n > 8) reader.fail("players must be between 2 and 8");
      players = static_cast<int>(n);
      actions.assign(players, {});
    } else if (key == "actions") {
      if (players == 0) reader.fail("'actions' before 'players'");
      if (words.size() < 3) reader.fail("'actions' needs a player number and at least one label");
      const long long p = reader.integer(words[1], "actions");
      if (p < 1 || p > players) reader.fail("player " + words[1] + " out of range");
      auto& list = actions[p - 1];
      if (!list.empty()) reader.fail("actions for player " + words[1] + " given twice");
      list.assign(words.begin() + 2, words.end());
      std::vector<std::string> sorted = list;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        reader.fail("duplicate action label for player " + words[1]);
      }
    } else if (key == "payoffs") {
      reader.expect(words, "payoffs", 0);
      in_payoffs = true;
    } else {
      reader.fail("unknown keyword '" + key + "'");
    }
  }
  if (players == 0) reader.fail("missing 'players'");
  for (int i = 0; i < players; ++i) {
    if (actions[i].empty()) reader.fail("missing actions for player " + std::to_string(i + 1));
  }
  if (!in_payoffs) reader.fail("missing 'payoffs' block");

  Eigen::Index profiles = 1;
  for (const auto& list : actions) profiles *= static_cast<Eigen::Index>(list.size());
  Eigen::MatrixXd payoffs(profiles, players);
  std::vector<int> profile(players, 0);
  for (Eigen::Index k = 0; k < profiles; ++k) {
    if (!reader.next(words)) {
      reader.fail("payoffs: expected " + std::to_string(profiles) + " profiles, found " +
                  std::to_string(k) + "; profile " + std::to_string(k) + " " +
                  profile_name(actions, profile) + " is missing");
    }
    if (static_cast<int>(words.size()) != players) {
      reader.fail("profile " + std::to_string(k) + " " + profile_name(actions, profile) +
                  ": expected " + std::to_string(players) + " payoffs, found " +
                  std::to_string(words.size()));
    }
    for (int i = 0; i < players; ++i) {
      payoffs(k, i) = reader.number(words[i], "profile " + std::to_string(k));
    }
    advance(profile, actions);
  }
  if (reader.next(words)) {
    reader.fail("payoffs: more than " + std::to_string(profiles) + " profiles");
  }
  try {
    return {StageGame(std::move(actions), std::move(payoffs), name), source};
  } catch (const std::invalid_argument& e) {
    reader.fail(e.what());
  }
}

StageGame parse_game(std::istream& in, const std::string& source_name) {
  return parse_game_document(in, source_name).game;
}

StageGame parse_game(const std::string& text) {
  std::istringstream in(text);
  return parse_game(in);
}

GameDocument read_game_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open game file " + path.string());
  return parse_game_document(in, path.string());
}

void write_game(std::ostream& out, const StageGame& game, const std::string& source) {
  if (!game.name().empty()) out << "name " << game.name() << '\n';
  if (!source.empty()) out << "source " << source << '\n';
  out << "players " << game.player_count() << '\n';
  for (int i = 0; i < game.player_count(); ++i) {
    out << "actions " << i + 1;
    for (const auto& a : game.actions(i)) out << ' ' << a;
    out << '\n';
  }
  out << "payoffs\n";
  for (int k = 0; k < game.profile_count(); ++k) {
    for (int i = 0; i < game.player_count(); ++i) {
      out << (i ? " " : "") << format_number(game.payoff(k, i));
    }
    out << '\n';
  }
}

void write_snapshot(std::ostream& out, const Snapshot& s) {
  const CubeSet& cubes = s.cubes;
  out << kSnapshotMagic << ' ' << kSnapshotVersion << '\n';
  out << "game " << (s.game.empty() ? "unnamed" : s.game) << '\n';
  out << "mode " << to_string(s.mode) << '\n';
  out << "gamma " << format_number(s.gamma) << '\n';
  out << "iteration " << s.iteration << '\n';
  if (s.status) out << "status " << to_string(*s.status) << '\n';
  out << "dimension " << cubes.dimension() << '\n';
  out << "base";
  write_vector(out, cubes.base_origin());
  out << '\n' << "base_side " << format_number(cubes.base_side()) << '\n';
  out << "generation " << cubes.generation() << '\n';
  out << "side " << format_number(cubes.side()) << '\n';

  // Hulls are shared between certificates; write each once.
  std::map<const HullRegion*, int> hull_index;
  std::vector<const SupportCertificate*> hull_owners;
  for (const auto& cert : s.certificates) {
    if (cert.hull && hull_index.emplace(cert.hull.get(), static_cast<int>(hull_index.size())).second) {
      hull_owners.push_back(&cert);
    }
  }
  out << "hulls " << hull_owners.size() << '\n';
  for (std::size_t h = 0; h < hull_owners.size(); ++h) {
    const HullRegion& region = *hull_owners[h]->hull;
    out << "hull " << h << ' ' << region.planes.size();
    for (const HalfPlane& p : region.planes) {
      out << ' ' << format_number(p.phi) << ' ' << format_number(p.psi) << ' '
          << format_number(p.lambda);
    }
    out << ' ' << format_number(region.low.x()) << ' ' << format_number(region.low.y()) << ' '
        << format_number(region.high.x()) << ' ' << format_number(region.high.y()) << '\n';
  }

  out << "cubes " << cubes.size() << '\n';
  const bool certified = s.certificates.size() == cubes.size();
  for (std::size_t k = 0; k < cubes.size(); ++k) {
    out << "cube";
    for (std::int32_t c : cubes.cell(k)) out << ' ' << c;
    out << '\n';
    if (!certified) continue;
    const SupportCertificate& cert = s.certificates[k];
    const SupportSolution& sol = cert.solution;
    out << "  floor";
    write_vector(out, cert.floor);
    out << '\n' << "  pattern";
    for (std::size_t i = 0; i < sol.pattern.actions.size(); ++i) {
      if (i) out << " |";
      for (int a : sol.pattern.actions[i]) out << ' ' << a;
    }
    out << '\n';
    write_groups(out, "alpha", sol.alpha.probabilities);
    write_groups(out, "w", sol.continuation);
    write_groups(out, "u", sol.utility);
    if (cert.cluster) {
      out << "  cluster";
      write_vector(out, cert.cluster->origin);
      write_vector(out, cert.cluster->lengths);
      out << '\n';
    } else if (cert.hull) {
      out << "  hull " << hull_index.at(cert.hull.get()) << '\n';
    }
  }
  out << "end\n";
}

Snapshot read_snapshot(std::istream& in, const std::string& source_name) {
  LineReader reader(in, source_name);
  std::vector<std::string> words;
  if (!reader.next(words) || words[0] != kSnapshotMagic) reader.fail("not a snapshot file");
  reader.expect(words, kSnapshotMagic, 1);
  if (reader.integer(words[1], "version") != kSnapshotVersion) reader.fail("unsupported version");

  Snapshot s;
  words = next_line(reader, "game");
  s.game = reader.rest_after_keyword();
  words = next_line(reader, "mode");
  reader.expect(words, "mode", 1);
  try {
    s.mode = parse_mode(words[1]);
  } catch (const std::invalid_argument& e) {
    reader.fail(e.what());
  }
  words = next_line(reader, "gamma");
  reader.expect(words, "gamma", 1);
  s.gamma = reader.number(words[1], "gamma");
  words = next_line(reader, "iteration");
  reader.expect(words, "iteration", 1);
  s.iteration = static_cast<int>(reader.integer(words[1], "iteration"));

  if (!reader.next(words)) reader.fail("unexpected end of input");
  if (words[0] == "status") {
    reader.expect(words, "status", 1);
    for (SolveStatus st : {SolveStatus::Converged, SolveStatus::Empty, SolveStatus::GenerationLimit}) {
      if (to_string(st) == words[1]) s.status = st;
    }
    if (!s.status) reader.fail("unknown status '" + words[1] + "'");
    if (!reader.next(words)) reader.fail("unexpected end of input");
  }
  reader.expect(words, "dimension", 1);
  const long long n = reader.integer(words[1], "dimension");
  if (n < 1 || n > 8) reader.fail("dimension out of range");
  const int dim = static_cast<int>(n);
  words = next_line(reader, "base");
  const Eigen::VectorXd base = read_numbers(reader, words, 1, dim);
  words = next_line(reader, "base_side");
  reader.expect(words, "base_side", 1);
  const double base_side = reader.number(words[1], "base_side");
  words = next_line(reader, "generation");
  reader.expect(words, "generation", 1);
  const int generation = static_cast<int>(reader.integer(words[1], "generation"));
  words = next_line(reader, "side");
  reader.expect(words, "side", 1);
  try {
    s.cubes = CubeSet(base, base_side, generation);
  } catch (const std::invalid_argument& e) {
    reader.fail(e.what());
  }
  if (reader.number(words[1], "side") != s.cubes.side()) {
    reader.fail("side does not match base_side / 2^generation");
  }

  words = next_line(reader, "hulls");
  reader.expect(words, "hulls", 1);
  const long long hull_count = reader.integer(words[1], "hulls");
  std::vector<std::shared_ptr<const HullRegion>> hulls;
  for (long long h = 0; h < hull_count; ++h) {
    words = next_line(reader, "hull");
    if (words.size() < 3 || reader.integer(words[1], "hull") != h) reader.fail("hull out of order");
    const long long planes = reader.integer(words[2], "hull");
    if (planes < 0) reader.fail("negative plane count");
    const Eigen::VectorXd v = read_numbers(reader, words, 3, 3 * planes + 4);
    auto region = std::make_shared<HullRegion>();
    for (long long p = 0; p < planes; ++p) region->planes.push_back({v(3 * p), v(3 * p + 1), v(3 * p + 2)});
    region->low = Eigen::Vector2d(v(3 * planes), v(3 * planes + 1));
    region->high = Eigen::Vector2d(v(3 * planes + 2), v(3 * planes + 3));
    hulls.push_back(std::move(region));
  }

  words = next_line(reader, "cubes");
  reader.expect(words, "cubes", 1);
  const long long count = reader.integer(words[1], "cubes");
  if (count < 0) reader.fail("negative cube count");
  std::vector<std::int32_t> cell(dim);
  std::vector<int> sizes;
  auto read_certificate = [&](std::vector<std::string>& w) {
    SupportCertificate cert;
    cert.mode = s.mode;
    cert.gamma = s.gamma;
    cert.cube = s.cubes.cube(s.cubes.size() - 1);
    cert.floor = read_numbers(reader, w, 1, dim);
    w = next_line(reader, "pattern");
    for (const auto& group : split_groups(reader, w, dim)) {
      std::vector<int> list;
      for (const auto& a : group) list.push_back(static_cast<int>(reader.integer(a, "pattern")));
      cert.solution.pattern.actions.push_back(std::move(list));
    }
    w = next_line(reader, "alpha");
    const auto alpha = split_groups(reader, w, dim);
    sizes.clear();
    for (const auto& g : alpha) sizes.push_back(static_cast<int>(g.size()));
    cert.solution.alpha.probabilities = read_groups(reader, w, sizes);
    w = next_line(reader, "w");
    cert.solution.continuation = read_groups(reader, w, sizes);
    w = next_line(reader, "u");
    cert.solution.utility = read_groups(reader, w, sizes);
    if (!reader.next(w)) reader.fail("unexpected end of input");
    if (w[0] == "cluster") {
      const Eigen::VectorXd v = read_numbers(reader, w, 1, 2 * dim);
      cert.cluster = Cluster{v.head(dim), v.tail(dim)};
    } else if (w[0] == "hull") {
      reader.expect(w, "hull", 1);
      const long long h = reader.integer(w[1], "hull");
      if (h < 0 || h >= static_cast<long long>(hulls.size())) reader.fail("unknown hull " + w[1]);
      cert.hull = hulls[h];
    } else {
      reader.fail("expected 'cluster' or 'hull', found '" + w[0] + "'");
    }
    return cert;
  };

  if (!reader.next(words)) reader.fail("unexpected end of input");
  for (long long k = 0; k < count; ++k) {
    if (words[0] != "cube") reader.fail("expected 'cube', found '" + words[0] + "'");
    if (static_cast<int>(words.size()) != dim + 1) reader.fail("'cube' takes " + std::to_string(dim) + " coordinates");
    for (int d = 0; d < dim; ++d) cell[d] = static_cast<std::int32_t>(reader.integer(words[d + 1], "cube"));
    const std::size_t before = s.cubes.size();
    s.cubes.insert(cell);
    if (s.cubes.size() != before + 1 ||
        !std::equal(cell.begin(), cell.end(), s.cubes.cell(s.cubes.size() - 1).begin())) {
      reader.fail("cubes must be listed once each in lexicographic order");
    }
    if (!reader.next(words)) {
      if (k + 1 < count) reader.fail("unexpected end of input");
      reader.fail("missing 'end'");
    }
    if (words[0] == "floor") {
      s.certificates.push_back(read_certificate(words));
      if (!reader.next(words)) reader.fail("missing 'end'");
    }
  }
  if (words[0] != "end") reader.fail("expected 'end', found '" + words[0] + "'");
  if (!s.certificates.empty() && s.certificates.size() != s.cubes.size()) {
    reader.fail("either every cube or no cube carries a certificate");
  }
  return s;
}

Snapshot read_snapshot_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot " + path.string());
  return read_snapshot(in, path.string());
}

std::vector<std::size_t> replay(const StageGame& game, const Snapshot& snapshot) {
  if (snapshot.certificates.size() != snapshot.cubes.size()) {
    throw std::invalid_argument("snapshot carries no certificates");
  }
  std::vector<std::size_t> failed;
  for (std::size_t k = 0; k < snapshot.certificates.size(); ++k) {
    bool ok = false;
    try {
      ok = verify_certificate(game, snapshot.certificates[k]);
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok) failed.push_back(k);
  }
  return failed;
}

std::string render_svg(const CubeSet& cubes, const std::string& title) {
  if (cubes.dimension() != 2) throw std::invalid_argument("plots need a two-dimensional set");
  constexpr double size = 480.0;
  constexpr double margin = 48.0;
  constexpr double plot = size - 2 * margin;
  const double lo_x = cubes.base_origin()(0);
  const double lo_y = cubes.base_origin()(1);
  const double span = cubes.base_side();
  const double scale = plot / span;
  auto px = [&](double x) { return format_number(margin + (x - lo_x) * scale); };
  auto py = [&](double y) { return format_number(size - margin - (y - lo_y) * scale); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << size / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << title << "</text>\n";
  svg << "<g fill=\"#4a7ab5\" stroke=\"#2c4f7c\" stroke-width=\"0.5\">\n";
  const std::string width = format_number(cubes.side() * scale);
  for (std::size_t k = 0; k < cubes.size(); ++k) {
    svg << "<rect x=\"" << px(cubes.origin(k, 0)) << "\" y=\"" << py(cubes.origin(k, 1) + cubes.side())
        << "\" width=\"" << width << "\" height=\"" << width << "\"/>\n";
  }
  svg << "</g>\n";
  svg << "<g stroke=\"black\" fill=\"none\">\n";
  svg << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << plot << "\" height=\""
      << plot << "\"/>\n</g>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = t / 4.0;
    const std::string xs = format_number(lo_x + v * span);
    const std::string ys = format_number(lo_y + v * span);
    svg << "<text x=\"" << px(lo_x + v * span) << "\" y=\"" << size - margin + 16
        << "\" text-anchor=\"middle\">" << xs << "</text>\n";
    svg << "<text x=\"" << margin - 6 << "\" y=\"" << py(lo_y + v * span)
        << "\" text-anchor=\"end\" dominant-baseline=\"middle\">" << ys << "</text>\n";
  }
  svg << "<text x=\"" << size / 2 << "\" y=\"" << size - 10
      << "\" text-anchor=\"middle\">player 1</text>\n";
  svg << "<text x=\"14\" y=\"" << size / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << size / 2 << ")\">player 2</text>\n";
  if (cubes.empty()) {
    svg << "<text x=\"" << size / 2 << "\" y=\"" << size / 2
        << "\" text-anchor=\"middle\" font-size=\"20\">empty</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace spe
