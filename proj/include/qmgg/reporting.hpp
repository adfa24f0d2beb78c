// File outputs: win-rate series and tournament matrices as CSV, Q-table
// snapshots, and JSON run metadata.

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmgg/game.hpp"
#include "qmgg/learning.hpp"

#include <json.hpp>

namespace qmgg {

struct WinRateSeries;
struct ExperimentResult;
struct TournamentMatrix;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; the message carries the path and line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// A role's Q-table plus the header fields stored with it.
struct QTableSnapshot {
  GameSpec game;
  QTable table;
  LearningParams params;
  std::int64_t matches = 0;
};

/// Header line, then one `key<TAB>move<TAB>value` line per entry in (key,
/// move) order.
void save_qtable(const QTableSnapshot& snapshot, const std::filesystem::path& path);
QTableSnapshot load_qtable(const std::filesystem::path& path);

std::filesystem::path role_table_path(const std::filesystem::path& prefix, Role role);
void save_role_tables(const RoleTables& tables, const GameSpec& game, const LearningParams& params,
                      std::int64_t matches, const std::filesystem::path& prefix);
RoleTables load_role_tables(const std::filesystem::path& prefix, const GameSpec& game);

/// `match,win_rate,phase,wins,draws,losses`, one row per window.
void write_series(const WinRateSeries& series, const std::filesystem::path& path);
/// `match,mean_win_rate,variance,phase` across the repetitions.
void write_aggregate(const ExperimentResult& result, const std::filesystem::path& path);
/// Row agent in the first column, column agents in the header, `-` on the
/// diagonal.
void write_matrix(const TournamentMatrix& matrix, const std::filesystem::path& path);
std::string matrix_to_csv(const TournamentMatrix& matrix);
nlohmann::json matrix_to_json(const TournamentMatrix& matrix);

struct RunMetadata {
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<std::string> notes;
};

nlohmann::json to_json(const RunMetadata& metadata);
void write_metadata(const RunMetadata& metadata, const std::filesystem::path& path);

/// Library version string embedded in metadata.
std::string version_string();

}  // namespace qmgg
