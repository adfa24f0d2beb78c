// Flat Monte Carlo Search and UCT-minmax Monte Carlo Tree Search.
//
// Both searchers run under a SearchBudget. Playout budgets make a search a
// pure function of (state, budget, rng seed); wall-clock budgets mirror the
// original time-limited formulation and are not reproducible.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qmgg/game.hpp"
#include "qmgg/random.hpp"

namespace qmgg {

struct SearchBudget {
  enum class Mode : std::uint8_t { kPlayouts, kWallClockMillis };

  Mode mode = Mode::kPlayouts;
  std::int64_t amount = 0;

  static SearchBudget playouts(std::int64_t n) { return {Mode::kPlayouts, n}; }
  static SearchBudget millis(std::int64_t ms) { return {Mode::kWallClockMillis, ms}; }

  /// `playouts:N` or `ms:N`.
  std::string token() const;
  friend bool operator==(const SearchBudget&, const SearchBudget&) = default;
};

/// Parses `playouts:N` / `ms:N`; throws ConfigError otherwise.
SearchBudget parse_budget(std::string_view text);

struct PlayoutResult {
  std::array<int, 2> goals{};
  int goal(Role role) const { return goals[index_of(role)]; }
};

/// Plays uniformly random legal moves from `state` to the end of the game.
/// A terminal input returns its goals directly.
PlayoutResult random_playout(const GameState& state, RandomStream& rng);

/// Per-move probe statistics of one flat search, in legal-move order.
struct McsStats {
  std::vector<Move> moves;
  std::vector<double> score;
  std::vector<std::int64_t> visits;
  std::int64_t playouts = 0;
};

/// Flat Monte Carlo Search. Probes legal moves round-robin, each probe being
/// one random playout from the successor, and returns the move with the best
/// mean goal for the mover (ties: lowest move index). With a single legal move
/// no playout is spent; with no completed probe the first legal move is
/// returned.
Move mcs_select(const GameState& state, const SearchBudget& budget, RandomStream& rng,
                McsStats* stats = nullptr);

/// Search tree stored as an index arena. Node 0 is the root. Positions are not
/// stored; they are rebuilt by replaying moves from the root while descending.
class SearchTree {
 public:
  using NodeId = std::int32_t;
  static constexpr NodeId kNone = -1;

  struct Node {
    Move move{-1};              // move from the parent; -1 for the root
    NodeId parent = kNone;
    NodeId first_child = kNone;  // children are contiguous, in move order
    std::int32_t child_count = 0;
    Role mover = Role::kFirst;   // side to move in this node's position
    bool terminal = false;
    std::int64_t visits = 0;
    double total_value = 0.0;
    std::int64_t playouts = 0;   // playouts launched from this node itself
  };

  explicit SearchTree(const GameState& root_state);

  const GameState& root_state() const { return root_state_; }
  const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  Node& node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return nodes_.size(); }
  bool is_leaf(NodeId id) const { return node(id).child_count == 0; }

  /// Adds one child per legal move of `state`, which must be the position of
  /// node `id`.
  void expand(NodeId id, const GameState& state);

 private:
  GameState root_state_;
  std::vector<Node> nodes_;
};

/// Exploration settings of uct_minmax.
///
/// The default weighs the exploration term by 100 goal units (C = 1 on
/// rewards scaled to [0, 1]) and subtracts it on the opponent's turns so the
/// minimising side explores too. verbatim() is the bare formula, C = 1 on the
/// 0..100 goal scale with the term always added; it leaves the opponent's
/// replies almost unexplored and misses refutations in TicTacToe.
struct UctParams {
  double exploration = 100.0;
  bool optimistic_min = true;

  static constexpr UctParams verbatim() { return {1.0, false}; }
};

/// Child selection by UCT-minmax: mean +/- c * sqrt(ln(parent visits + 1) /
/// child visits), maximised when `my_role` is to move at `id` and minimised
/// otherwise. Unvisited children come first, in move order.
SearchTree::NodeId uct_minmax(const SearchTree& tree, SearchTree::NodeId id, Role my_role,
                              const UctParams& uct_params = {});

/// Runs MCTS iterations on a tree: descend by uct_minmax, expand the leaf,
/// take one more uct_minmax step, play out, and back up `my_role`'s goal into
/// every node on the path including the root.
class MctsSearch {
 public:
  MctsSearch(const GameState& root, Role my_role, const UctParams& uct_params = {});

  /// Returns the number of iterations completed.
  std::int64_t run(const SearchBudget& budget, RandomStream& rng);
  void iterate(RandomStream& rng);

  /// Root child with the highest mean value (ties: lowest move index); the
  /// first legal move when no child has been visited.
  Move best_move() const;

  const SearchTree& tree() const { return tree_; }

 private:
  SearchTree tree_;
  Role my_role_;
  UctParams uct_params_;
  std::vector<SearchTree::NodeId> path_;
};

Move mcts_select(const GameState& state, const SearchBudget& budget, RandomStream& rng,
                 Role my_role, const UctParams& uct_params = {});

}  // namespace qmgg
