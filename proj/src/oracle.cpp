#include "qmgg/oracle.hpp"

#include <algorithm>
#include <unordered_set>

namespace qmgg {

std::int64_t count_reachable_states(const GameSpec& spec, std::int64_t limit) {
  std::unordered_set<std::string> seen;
  std::vector<GameState> frontier{GameState(spec)};
  seen.insert(frontier.front().key());
  std::vector<Move> moves;
  while (!frontier.empty()) {
    std::vector<GameState> next;
    for (const GameState& state : frontier) {
      state.legal_moves(moves);
      for (Move move : moves) {
        GameState child = state.apply(move);
        if (!seen.insert(child.key()).second) continue;
        if (static_cast<std::int64_t>(seen.size()) > limit) {
          throw ResourceError(spec.token() + " has more than " + std::to_string(limit) +
                              " reachable states");
        }
        next.push_back(std::move(child));
      }
    }
    frontier = std::move(next);
  }
  return static_cast<std::int64_t>(seen.size());
}

MinimaxOracle::MinimaxOracle(const GameSpec& spec, std::int64_t limit)
    : spec_(spec), limit_(limit) {
  spec_.validate();
}

int MinimaxOracle::solve(const GameState& state) {
  if (state.is_terminal()) return state.goal(Role::kFirst);
  std::string key = state.key();
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  const bool first_to_move = state.to_move() == Role::kFirst;
  int best = first_to_move ? -1 : kGoalWin + 1;
  for (Move move : state.legal_moves()) {
    const int v = solve(state.apply(move));
    best = first_to_move ? std::max(best, v) : std::min(best, v);
  }
  if (static_cast<std::int64_t>(memo_.size()) >= limit_) {
    throw ResourceError(spec_.token() + " exceeds the oracle limit of " + std::to_string(limit_) +
                        " states");
  }
  memo_.emplace(std::move(key), best);
  return best;
}

int MinimaxOracle::value(const GameState& state) {
  if (state.spec() != spec_) throw ContractViolation("oracle queried with a foreign game");
  return solve(state);
}

int MinimaxOracle::value_for_mover(const GameState& state) {
  const int v = value(state);
  return state.to_move() == Role::kFirst ? v : kGoalWin - v;
}

int MinimaxOracle::move_value(const GameState& state, Move move) {
  const int v = value(state.apply(move));
  return state.to_move() == Role::kFirst ? v : kGoalWin - v;
}

std::vector<Move> MinimaxOracle::optimal_moves(const GameState& state) {
  std::vector<Move> out;
  const int best = value_for_mover(state);
  for (Move move : state.legal_moves()) {
    if (move_value(state, move) == best) out.push_back(move);
  }
  return out;
}

}  // namespace qmgg
