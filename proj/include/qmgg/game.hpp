// Rule engines for the small two-player zero-sum board games used by the
// learners and searchers: n×n TicTacToe, ConnectFour with gravity, and
// rhombus Hex. All three share one value type, GameState.
//
// Conventions:
//   * Role kFirst always moves first and owns the P0 stones.
//   * Goals follow the GGP scale: 100 win, 50 draw, 0 loss.
//   * ConnectFour rows are numbered from the bottom (row 0) upwards.
//   * In Hex, kFirst joins the top and bottom rows, kSecond joins the left
//     and right columns; adjacency is the usual six-neighbour rhombus.

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qmgg {

/// Invalid user-supplied configuration (bad game token, bad dimensions...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (illegal move, goal of a live
/// position...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Role : std::uint8_t { kFirst = 0, kSecond = 1 };

constexpr Role opponent(Role role) {
  return role == Role::kFirst ? Role::kSecond : Role::kFirst;
}
constexpr int index_of(Role role) { return static_cast<int>(role); }
constexpr Role role_from_index(int index) {
  return index == 0 ? Role::kFirst : Role::kSecond;
}

/// Cell index for TicTacToe and Hex, column index for ConnectFour.
struct Move {
  int index = 0;
  friend constexpr auto operator<=>(Move, Move) = default;
};

inline constexpr int kGoalWin = 100;
inline constexpr int kGoalDraw = 50;
inline constexpr int kGoalLoss = 0;

enum class GameKind : std::uint8_t { kTicTacToe, kConnectFour, kHex };

struct GameSpec {
  GameKind kind = GameKind::kTicTacToe;
  int width = 3;
  int height = 3;
  int k_in_row = 3;  // unused for Hex

  static GameSpec tictactoe(int size) { return {GameKind::kTicTacToe, size, size, size}; }
  static GameSpec connect_four(int width, int height, int k) {
    return {GameKind::kConnectFour, width, height, k};
  }
  static GameSpec hex(int size) { return {GameKind::kHex, size, size, 0}; }

  /// Throws ConfigError when the dimensions break the per-kind rules.
  void validate() const;

  int cell_count() const { return width * height; }
  /// Exclusive upper bound of Move::index.
  int move_space() const { return kind == GameKind::kConnectFour ? width : cell_count(); }

  /// Text form, e.g. `tictactoe:3x3:3`, `connectfour:4x4:4`, `hex:3x3`.
  std::string token() const;

  friend bool operator==(const GameSpec&, const GameSpec&) = default;
};

/// Parses the text form produced by GameSpec::token(). The win length may be
/// omitted: TicTacToe defaults to the board size, ConnectFour to 4.
GameSpec parse_game_spec(std::string_view token);

enum class Cell : std::uint8_t { kEmpty = 0, kP0 = 1, kP1 = 2 };

constexpr Cell stone_of(Role role) { return role == Role::kFirst ? Cell::kP0 : Cell::kP1; }

class GameState {
 public:
  /// Empty board, kFirst to move.
  explicit GameState(const GameSpec& spec);

  const GameSpec& spec() const { return spec_; }
  const std::vector<Cell>& cells() const { return cells_; }
  Cell at(int row, int col) const { return cells_[row * spec_.width + col]; }
  Role to_move() const { return to_move_; }
  int move_count() const { return move_count_; }

  bool is_terminal() const { return winner_.has_value() || move_count_ == spec_.cell_count(); }
  /// Set only on terminal positions that are not draws.
  std::optional<Role> winner() const { return winner_; }

  std::vector<Move> legal_moves() const;
  /// Overwrites `out`; avoids an allocation in tight loops.
  void legal_moves(std::vector<Move>& out) const;
  bool is_legal(Move move) const;
  int legal_move_count() const;

  /// Returns the successor position. Throws ContractViolation on an illegal
  /// move or a terminal position.
  GameState apply(Move move) const;
  /// In-place variant of apply(), same checks.
  void play(Move move);

  /// Goal of `role` in a terminal position (100/50/0). Throws
  /// ContractViolation on a live position.
  int goal(Role role) const;

  /// Deterministic identity of the position: `<spec token>|<cells>|<mover>`
  /// with cells written row-major as '.', 'x' (P0), 'o' (P1).
  std::string key() const;

  friend bool operator==(const GameState&, const GameState&) = default;

 private:
  int target_cell(Move move) const;  // -1 when illegal
  void place(int cell);
  bool completes_line(int cell) const;
  bool completes_hex_chain(int cell) const;

  GameSpec spec_;
  std::vector<Cell> cells_;
  Role to_move_ = Role::kFirst;
  int move_count_ = 0;
  std::optional<Role> winner_;
};

inline GameState initial_state(const GameSpec& spec) { return GameState(spec); }

namespace detail {

/// Whole-board winner scan. Reference definition of terminal detection; the
/// incremental check in GameState::play must agree with it.
std::optional<Role> scan_winner(const GameSpec& spec, const std::vector<Cell>& cells);

}  // namespace detail

}  // namespace qmgg
