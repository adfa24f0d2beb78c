// Match runner, learning experiments, and round-robin tournaments.
//
// Every entry point that loops over independent work (repetitions of an
// experiment, matches of a tournament) has a serial reference path and an
// OpenMP path. Randomness is drawn from substreams keyed by (repetition,
// match) or (pair, match), so both paths produce identical results.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmgg/agents.hpp"
#include "qmgg/game.hpp"
#include "qmgg/learning.hpp"
#include "qmgg/random.hpp"

namespace qmgg {

enum class Execution : std::uint8_t { kSerial, kParallel };

struct MatchResult {
  std::int64_t match_index = 0;
  int first_mover = 0;            // which agent (0 or 1) moved first
  std::array<int, 2> goals{};     // per agent, not per role
  int move_count = 0;
  std::vector<Move> moves;        // filled only when logging is requested
};

struct MatchOutcome {
  MatchResult result;
  std::array<std::optional<MatchRecord>, 2> records;  // per learning agent
};

/// Plays one game to the end. agent0 moves first on even `m`. When `learning`
/// is set, each learning agent is updated with its own record at the end.
MatchOutcome play_match(Agent& agent0, Agent& agent1, const GameSpec& spec, RandomStream& rng,
                        std::int64_t m, bool learning, bool log_moves = false);

enum class Outcome : std::uint8_t { kLoss, kDraw, kWin };

Outcome outcome_for(const MatchResult& result, int agent);

struct SeriesPoint {
  std::int64_t match = 0;  // matches played at the end of the window
  double win_rate = 0.0;
  bool exploitation = false;
  int wins = 0;
  int draws = 0;
  int losses = 0;
};

/// Results of one learner-vs-opponent run, seen from the learner (agent 0).
struct WinRateSeries {
  std::vector<MatchResult> matches;
  int window = 500;
  std::int64_t learning_matches = 0;

  /// One point per complete, non-overlapping window. A window is flagged
  /// exploitation when it starts at or after the learning phase.
  std::vector<SeriesPoint> points() const;
};

struct ExperimentConfig {
  GameSpec game;
  AgentSpec learner;
  AgentSpec opponent;
  std::int64_t learning_matches = 50000;
  int repetitions = 5;
  std::uint64_t seed = 1;
  int window = 500;
  /// Evaluation length used only when learning_matches is 0.
  std::int64_t baseline_matches = 10000;
  bool keep_tables = true;

  std::int64_t exploitation_matches() const;
  std::int64_t total_matches() const { return learning_matches + exploitation_matches(); }
  void validate() const;
};

struct Tally {
  std::int64_t wins = 0;
  std::int64_t draws = 0;
  std::int64_t losses = 0;
  std::int64_t total() const { return wins + draws + losses; }
  double win_rate() const { return total() ? static_cast<double>(wins) / total() : 0.0; }
  /// Wins over decisive games.
  double decisive_win_rate() const {
    return wins + losses ? static_cast<double>(wins) / (wins + losses) : 0.0;
  }
};

struct RepetitionResult {
  WinRateSeries series;
  Tally exploitation;
  double convergence_win_rate = 0.0;
  std::int64_t learning_updates = 0;
  std::optional<RoleTables> tables;
};

struct AggregatePoint {
  std::int64_t match = 0;
  double mean_win_rate = 0.0;
  double variance = 0.0;  // sample variance across repetitions
  bool exploitation = false;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RepetitionResult> repetitions;
  std::vector<AggregatePoint> aggregate;
  double mean_convergence = 0.0;
  double convergence_variance = 0.0;
};

/// Learning phase (matches 0..l-1, exploration from the schedule, updates on)
/// followed by the exploitation phase (exploration 0, no updates).
ExperimentResult run_experiment(const ExperimentConfig& config,
                                Execution execution = Execution::kParallel);
RepetitionResult run_repetition(const ExperimentConfig& config, int repetition);

struct TournamentMatrix {
  std::vector<std::string> labels;
  std::vector<AgentSpec> agents;
  std::int64_t matches = 0;
  /// wins[row][col]: column agent's wins against the row agent / matches.
  std::vector<std::vector<std::optional<double>>> wins;
  std::vector<std::vector<std::optional<double>>> draws;
};

/// Each unordered pair plays `n_matches` with alternating first mover; both
/// cells of the pair come from the same matches. Learners play frozen and
/// must carry a snapshot.
TournamentMatrix run_tournament(const std::vector<AgentSpec>& agents, const GameSpec& spec,
                                std::int64_t n_matches, std::uint64_t seed,
                                Execution execution = Execution::kParallel);

/// Head-to-head tally of frozen agents, from agent0's side.
Tally compete(const AgentSpec& agent0, const AgentSpec& agent1, const GameSpec& spec,
              std::int64_t n_matches, std::uint64_t seed,
              Execution execution = Execution::kParallel);

struct EpsilonComparison {
  std::vector<EpsilonSchedule> variants;
  std::vector<ExperimentResult> results;
  /// Mean exploitation win rate per variant.
  std::vector<double> final_win_rates;
};

/// QPlayer (alpha 0.1, gamma 0.9) against Random, once per exploration
/// schedule, all variants forced to eps = 0 after `l` matches.
EpsilonComparison epsilon_comparison_experiment(const GameSpec& spec,
                                                const std::vector<EpsilonSchedule>& variants,
                                                std::int64_t l, int repetitions,
                                                std::uint64_t seed, int window = 500,
                                                Execution execution = Execution::kParallel);

}  // namespace qmgg
