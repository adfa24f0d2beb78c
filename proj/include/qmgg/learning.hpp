// Tabular Q-learning: per-role Q-tables, the end-of-match backward update,
// the cosine exploration schedule, and the QPlayer / QMPlayer selection rules.

#pragma once

#include <array>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qmgg/game.hpp"
#include "qmgg/random.hpp"
#include "qmgg/search.hpp"

namespace qmgg {

struct LearningParams {
  double alpha = 0.1;  // learning rate
  double gamma = 0.9;  // discount factor

  void validate() const;
  friend bool operator==(const LearningParams&, const LearningParams&) = default;
};

/// eps(m) = a * cos(m * pi / (2 l)) + b for m <= l, 0 afterwards.
/// A fixed exploration rate e over l matches is {a = 0, b = e}.
struct EpsilonSchedule {
  double a = 0.5;
  double b = 0.0;
  std::int64_t l = 50000;

  static EpsilonSchedule cosine(double a, double b, std::int64_t l) { return {a, b, l}; }
  static EpsilonSchedule fixed(double eps, std::int64_t l) { return {0.0, eps, l}; }

  double operator()(std::int64_t m) const;
  void validate() const;
  /// `cosine:a:b` or `fixed:e` (l is carried separately).
  std::string token() const;
  friend bool operator==(const EpsilonSchedule&, const EpsilonSchedule&) = default;
};

double epsilon(const EpsilonSchedule& schedule, std::int64_t m);

/// Parses `cosine:a:b` or `fixed:e` with the given learning length.
EpsilonSchedule parse_epsilon(std::string_view text, std::int64_t l);

/// Learned values Q(s, a) of one role. Rows are keyed by GameState::key();
/// entries inside a row stay sorted by move index. An absent entry means
/// "never learned".
class QTable {
 public:
  using Row = std::vector<std::pair<Move, double>>;

  struct Entry {
    std::string key;
    Move move;
    double value;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  explicit QTable(Role role = Role::kFirst) : role_(role) {}

  Role role() const { return role_; }
  std::size_t size() const { return entries_; }
  bool empty() const { return entries_ == 0; }

  std::optional<double> get(const std::string& key, Move move) const;
  double get_or_zero(const std::string& key, Move move) const { return get(key, move).value_or(0.0); }
  void set(const std::string& key, Move move, double value);
  /// nullptr when nothing was ever stored for `key`.
  const Row* row(const std::string& key) const;
  /// Largest stored value for `key`, 0 when the row is absent.
  double max_value(const std::string& key) const;

  /// All entries ordered by (key, move).
  std::vector<Entry> sorted_entries() const;

  friend bool operator==(const QTable& lhs, const QTable& rhs);

 private:
  Role role_;
  std::unordered_map<std::string, Row> rows_;
  std::size_t entries_ = 0;
};

/// One of the learner's own decisions: the position it moved from, the move,
/// and the position at its next turn (or the terminal position).
struct Decision {
  std::string state_key;
  Move move;
  std::string next_key;
};

struct MatchRecord {
  std::vector<Decision> decisions;  // chronological
  std::string terminal_key;
  int terminal_goal = 0;            // goal of the recording role
};

/// R(s, a): the terminal goal when the decision led to the terminal position,
/// zero otherwise.
double reward(const MatchRecord& record, const Decision& decision);

/// Best learned move among `moves` for `state_key`. Only values strictly
/// above zero qualify, so a row of zeros counts as unlearned. Ties go to the
/// lowest move index.
std::optional<std::pair<Move, double>> q_lookup_max(const QTable& table,
                                                    const std::string& state_key,
                                                    std::span<const Move> moves);

/// Walks the record from the last decision back to the first, applying
/// Q(s,a) <- (1-alpha) Q(s,a) + alpha (R(s,a) + gamma max_a' Q(s',a')).
void q_backward_update(QTable& table, const MatchRecord& record, const LearningParams& params);

using RoleTables = std::array<QTable, 2>;

inline RoleTables make_role_tables() { return {QTable(Role::kFirst), QTable(Role::kSecond)}; }

/// epsilon-greedy selection with an explicit exploration rate. One uniform draw
/// is always taken first; below `eps` a random legal move is returned,
/// otherwise the mover's learned argmax, and `fallback` when the state is
/// unlearned.
template <class Fallback>
  requires std::invocable<Fallback&, const GameState&, std::span<const Move>, RandomStream&>
Move epsilon_greedy_select(const RoleTables& tables, const GameState& state, double eps,
                           RandomStream& rng, Fallback&& fallback) {
  const std::vector<Move> moves = state.legal_moves();
  if (moves.empty()) throw ContractViolation("selection on terminal state " + state.key());
  const double num = rng.uniform01();
  if (num < eps) return moves[rng.below(moves.size())];
  const auto& table = tables[index_of(state.to_move())];
  if (auto best = q_lookup_max(table, state.key(), moves)) return best->first;
  return fallback(state, std::span<const Move>(moves), rng);
}

Move qplayer_select_eps(const RoleTables& tables, const GameState& state, double eps,
                        RandomStream& rng);
Move qmplayer_select_eps(const RoleTables& tables, const GameState& state, double eps,
                         const SearchBudget& budget, RandomStream& rng);

/// QPlayer: epsilon-greedy with a uniformly random fallback on unlearned states.
Move qplayer_select(const RoleTables& tables, const GameState& state,
                    const EpsilonSchedule& schedule, std::int64_t m, RandomStream& rng);

/// QMPlayer: as qplayer_select, but unlearned states fall back to flat Monte
/// Carlo Search under `budget`.
Move qmplayer_select(const RoleTables& tables, const GameState& state,
                     const EpsilonSchedule& schedule, std::int64_t m, const SearchBudget& budget,
                     RandomStream& rng);

// --- Single decision-maker learning -------------------------------------

/// A one-role episodic environment. `step` may consume randomness (an
/// opponent reply, for instance).
template <class Env>
concept SinglePlayerEnvironment = requires(const Env& env, const typename Env::State& s, Move m,
                                           RandomStream& rng) {
  { env.initial() } -> std::same_as<typename Env::State>;
  { env.legal_moves(s) } -> std::same_as<std::vector<Move>>;
  { env.step(s, m, rng) } -> std::same_as<typename Env::State>;
  { env.is_terminal(s) } -> std::same_as<bool>;
  { env.terminal_reward(s) } -> std::convertible_to<double>;
  { env.key(s) } -> std::same_as<std::string>;
};

/// Deterministic puzzle: `length` consecutive choices among `width` moves.
/// Only the move `path[i]` at step i keeps the episode alive; reaching the end
/// pays 100, any wrong move ends the episode with 0.
class ChainPuzzle {
 public:
  struct State {
    int step = 0;
    bool failed = false;
  };

  ChainPuzzle(int width, std::vector<int> path);

  int width() const { return width_; }
  int length() const { return static_cast<int>(path_.size()); }
  int correct_move(int step) const { return path_[static_cast<std::size_t>(step)]; }

  State initial() const { return {}; }
  std::vector<Move> legal_moves(const State& s) const;
  State step(const State& s, Move m, RandomStream& rng) const;
  bool is_terminal(const State& s) const { return s.failed || s.step == length(); }
  double terminal_reward(const State& s) const { return s.failed ? 0.0 : kGoalWin; }
  std::string key(const State& s) const;

 private:
  int width_;
  std::vector<int> path_;
};

/// One role of a two-player game against a uniformly random opponent; the
/// learner moves first and the opponent's reply is folded into `step`.
class VersusRandomOpponent {
 public:
  using State = GameState;

  explicit VersusRandomOpponent(const GameSpec& spec) : spec_(spec) {}

  State initial() const { return GameState(spec_); }
  std::vector<Move> legal_moves(const State& s) const { return s.legal_moves(); }
  State step(const State& s, Move m, RandomStream& rng) const;
  bool is_terminal(const State& s) const { return s.is_terminal(); }
  double terminal_reward(const State& s) const { return s.goal(Role::kFirst); }
  std::string key(const State& s) const { return s.key(); }

 private:
  GameSpec spec_;
};

/// Single-table Q-learning: each episode acts epsilon-greedily (greedy with
/// random fallback once eps is 0), then runs the backward update over the
/// episode's decisions. Episode m draws from rng.split(m).
template <SinglePlayerEnvironment Env>
QTable single_player_qlearning(const Env& env, const LearningParams& params,
                               const EpsilonSchedule& schedule, std::int64_t matches,
                               const RandomStream& rng) {
  params.validate();
  QTable table(Role::kFirst);
  for (std::int64_t m = 0; m < matches; ++m) {
    RandomStream episode_rng = rng.split(static_cast<std::uint64_t>(m));
    const double eps = epsilon(schedule, m);
    MatchRecord record;
    auto state = env.initial();
    while (!env.is_terminal(state)) {
      const std::vector<Move> moves = env.legal_moves(state);
      std::string key = env.key(state);
      Move chosen = moves.front();
      if (episode_rng.uniform01() < eps) {
        chosen = moves[episode_rng.below(moves.size())];
      } else if (auto best = q_lookup_max(table, key, moves)) {
        chosen = best->first;
      } else {
        chosen = moves[episode_rng.below(moves.size())];
      }
      state = env.step(state, chosen, episode_rng);
      record.decisions.push_back({std::move(key), chosen, env.key(state)});
    }
    record.terminal_key = env.key(state);
    record.terminal_goal = static_cast<int>(env.terminal_reward(state));
    q_backward_update(table, record, params);
  }
  return table;
}

}  // namespace qmgg
