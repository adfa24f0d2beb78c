#include "qmgg/reporting.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "qmgg/harness.hpp"

namespace qmgg {

namespace {

constexpr std::string_view kQTableMagic = "#qtable";

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

template <class T>
T parse_number(std::string_view text, const std::string& path, std::size_t line,
               std::string_view what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(path, line, "invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  for (std::size_t start = 0;;) {
    const auto at = text.find(sep, start);
    out.push_back(text.substr(start, at - start));
    if (at == std::string_view::npos) return out;
    start = at + 1;
  }
}

}  // namespace

ParseError::ParseError(const std::string& path, std::size_t line, const std::string& what)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void save_qtable(const QTableSnapshot& snapshot, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << kQTableMagic << " game=" << snapshot.game.token()
      << " role=" << index_of(snapshot.table.role())
      << " alpha=" << format_double(snapshot.params.alpha)
      << " gamma=" << format_double(snapshot.params.gamma) << " matches=" << snapshot.matches
      << " entries=" << snapshot.table.size() << '\n';
  for (const auto& e : snapshot.table.sorted_entries()) {
    out << e.key << '\t' << e.move.index << '\t' << format_double(e.value) << '\n';
  }
  finish(out, path);
}

QTableSnapshot load_qtable(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open Q-table snapshot " + path.string());
  const std::string where = path.string();

  std::string line;
  if (!std::getline(in, line)) throw ParseError(where, 1, "missing header");
  const auto fields = split(line, ' ');
  if (fields.empty() || fields[0] != kQTableMagic) {
    throw ParseError(where, 1, "not a Q-table snapshot");
  }
  QTableSnapshot snapshot;
  std::optional<std::size_t> expected_entries;
  bool have_game = false;
  bool have_role = false;
  Role role = Role::kFirst;
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const auto eq = fields[i].find('=');
    if (eq == std::string_view::npos) throw ParseError(where, 1, "malformed header field");
    const auto name = fields[i].substr(0, eq);
    const auto value = fields[i].substr(eq + 1);
    if (name == "game") {
      try {
        snapshot.game = parse_game_spec(value);
      } catch (const ConfigError& e) {
        throw ParseError(where, 1, e.what());
      }
      have_game = true;
    } else if (name == "role") {
      const int r = parse_number<int>(value, where, 1, "role");
      if (r != 0 && r != 1) throw ParseError(where, 1, "role must be 0 or 1");
      role = role_from_index(r);
      have_role = true;
    } else if (name == "alpha") {
      snapshot.params.alpha = parse_number<double>(value, where, 1, "alpha");
    } else if (name == "gamma") {
      snapshot.params.gamma = parse_number<double>(value, where, 1, "gamma");
    } else if (name == "matches") {
      snapshot.matches = parse_number<std::int64_t>(value, where, 1, "match count");
    } else if (name == "entries") {
      expected_entries = parse_number<std::size_t>(value, where, 1, "entry count");
    }
  }
  if (!have_game || !have_role) throw ParseError(where, 1, "header lacks game or role");
  snapshot.table = QTable(role);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cols = split(line, '\t');
    if (cols.size() != 3 || cols[0].empty()) {
      throw ParseError(where, line_no, "expected key<TAB>move<TAB>value");
    }
    const Move move{parse_number<int>(cols[1], where, line_no, "move")};
    const double value = parse_number<double>(cols[2], where, line_no, "value");
    snapshot.table.set(std::string(cols[0]), move, value);
  }
  if (expected_entries && *expected_entries != snapshot.table.size()) {
    throw ParseError(where, line_no + 1,
                     "truncated snapshot: header announces " + std::to_string(*expected_entries) +
                         " entries, found " + std::to_string(snapshot.table.size()));
  }
  return snapshot;
}

std::filesystem::path role_table_path(const std::filesystem::path& prefix, Role role) {
  return std::filesystem::path(prefix.string() + ".role" + std::to_string(index_of(role)) +
                               ".qtable");
}

void save_role_tables(const RoleTables& tables, const GameSpec& game, const LearningParams& params,
                      std::int64_t matches, const std::filesystem::path& prefix) {
  for (const auto& table : tables) {
    save_qtable({game, table, params, matches}, role_table_path(prefix, table.role()));
  }
}

RoleTables load_role_tables(const std::filesystem::path& prefix, const GameSpec& game) {
  RoleTables tables = make_role_tables();
  for (int r = 0; r < 2; ++r) {
    const auto path = role_table_path(prefix, role_from_index(r));
    if (!std::filesystem::exists(path)) {
      throw ConfigError("missing Q-table snapshot " + path.string());
    }
    auto snapshot = load_qtable(path);
    if (snapshot.game != game) {
      throw ConfigError(path.string() + " was learned on " + snapshot.game.token() + ", not " +
                        game.token());
    }
    if (snapshot.table.role() != role_from_index(r)) {
      throw ConfigError(path.string() + " holds the wrong role");
    }
    tables[static_cast<std::size_t>(r)] = std::move(snapshot.table);
  }
  return tables;
}

void write_series(const WinRateSeries& series, const std::filesystem::path& path) {
  const auto points = series.points();
  if (points.empty()) throw std::invalid_argument("write_series: series has no complete window");
  auto out = open_for_write(path);
  out << "match,win_rate,phase,wins,draws,losses\n";
  for (const auto& p : points) {
    out << p.match << ',' << format_double(p.win_rate) << ','
        << (p.exploitation ? "exploitation" : "learning") << ',' << p.wins << ',' << p.draws
        << ',' << p.losses << '\n';
  }
  finish(out, path);
}

void write_aggregate(const ExperimentResult& result, const std::filesystem::path& path) {
  if (result.aggregate.empty()) throw std::invalid_argument("write_aggregate: empty aggregate");
  auto out = open_for_write(path);
  out << "match,mean_win_rate,variance,phase\n";
  for (const auto& p : result.aggregate) {
    out << p.match << ',' << format_double(p.mean_win_rate) << ',' << format_double(p.variance)
        << ',' << (p.exploitation ? "exploitation" : "learning") << '\n';
  }
  finish(out, path);
}

std::string matrix_to_csv(const TournamentMatrix& matrix) {
  std::ostringstream out;
  out << "agent";
  for (const auto& label : matrix.labels) out << ',' << label;
  out << '\n';
  for (std::size_t r = 0; r < matrix.labels.size(); ++r) {
    out << matrix.labels[r];
    for (std::size_t c = 0; c < matrix.labels.size(); ++c) {
      out << ',';
      if (r == c || !matrix.wins[r][c]) {
        out << '-';
      } else {
        out << format_double(*matrix.wins[r][c]);
      }
    }
    out << '\n';
  }
  return out.str();
}

void write_matrix(const TournamentMatrix& matrix, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << matrix_to_csv(matrix);
  finish(out, path);
}

nlohmann::json matrix_to_json(const TournamentMatrix& matrix) {
  nlohmann::json j;
  j["agents"] = matrix.labels;
  j["matches_per_pair"] = matrix.matches;
  auto cells = nlohmann::json::array();
  for (std::size_t r = 0; r < matrix.labels.size(); ++r) {
    for (std::size_t c = 0; c < matrix.labels.size(); ++c) {
      if (r == c || !matrix.wins[r][c]) continue;
      cells.push_back({{"row", matrix.labels[r]},
                       {"column", matrix.labels[c]},
                       {"column_win_rate", *matrix.wins[r][c]},
                       {"draw_rate", *matrix.draws[r][c]}});
    }
  }
  j["cells"] = std::move(cells);
  return j;
}

nlohmann::json to_json(const RunMetadata& metadata) {
  return {{"config", metadata.config},
          {"seed", metadata.seed},
          {"version", metadata.version},
          {"wall_seconds", metadata.wall_seconds},
          {"notes", metadata.notes}};
}

void write_metadata(const RunMetadata& metadata, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << to_json(metadata).dump(2) << '\n';
  finish(out, path);
}

std::string version_string() { return "qmgg 1.0.0"; }

}  // namespace qmgg
