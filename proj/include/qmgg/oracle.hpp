// Exhaustive ground truth for small games: reachable-state enumeration and
// memoised minimax.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "qmgg/game.hpp"

namespace qmgg {

/// The game's state space exceeds the oracle's limit.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::int64_t kOracleStateLimit = 10'000'000;

/// Number of distinct positions (terminal ones included) reachable from the
/// initial position. Throws ResourceError above `limit`.
std::int64_t count_reachable_states(const GameSpec& spec,
                                    std::int64_t limit = kOracleStateLimit);

class MinimaxOracle {
 public:
  explicit MinimaxOracle(const GameSpec& spec, std::int64_t limit = kOracleStateLimit);

  /// Goal of the first role under perfect play by both sides.
  int value(const GameState& state);
  /// Perfect-play goal of the side to move in `state`.
  int value_for_mover(const GameState& state);
  /// Perfect-play goal of the mover after playing `move`.
  int move_value(const GameState& state, Move move);
  /// Moves achieving value_for_mover(state), in move order.
  std::vector<Move> optimal_moves(const GameState& state);
  /// A move after which the mover loses under perfect play.
  bool is_losing_move(const GameState& state, Move move) { return move_value(state, move) == kGoalLoss; }

  std::size_t solved_states() const { return memo_.size(); }

 private:
  int solve(const GameState& state);

  GameSpec spec_;
  std::int64_t limit_;
  std::unordered_map<std::string, int> memo_;
};

}  // namespace qmgg
