#include "qmgg/game.hpp"

#include <algorithm>
#include <charconv>

namespace qmgg {

namespace {

constexpr std::array<std::pair<int, int>, 4> kLineDirections{{{0, 1}, {1, 0}, {1, 1}, {1, -1}}};
constexpr std::array<std::pair<int, int>, 6> kHexNeighbours{
    {{-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}}};

std::string_view kind_name(GameKind kind) {
  switch (kind) {
    case GameKind::kTicTacToe: return "tictactoe";
    case GameKind::kConnectFour: return "connectfour";
    case GameKind::kHex: return "hex";
  }
  return "unknown";
}

int parse_positive(std::string_view text, std::string_view token) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value <= 0) {
    throw ConfigError("invalid number '" + std::string(text) + "' in game token '" +
                      std::string(token) + "'");
  }
  return value;
}

// Length of the run of `stone` starting next to (row, col) in direction (dr, dc).
int run_length(const GameSpec& spec, const std::vector<Cell>& cells, int row, int col, int dr,
               int dc, Cell stone) {
  int n = 0;
  for (int r = row + dr, c = col + dc; r >= 0 && r < spec.height && c >= 0 && c < spec.width;
       r += dr, c += dc) {
    if (cells[r * spec.width + c] != stone) break;
    ++n;
  }
  return n;
}

// Flood fill over `stone` from the seed cells; reports which of the two target
// sides were touched.
bool hex_connects(const GameSpec& spec, const std::vector<Cell>& cells, Cell stone,
                  std::vector<int> frontier) {
  const bool vertical = stone == Cell::kP0;
  std::vector<char> seen(cells.size(), 0);
  for (int c : frontier) seen[c] = 1;
  bool near_side = false;
  bool far_side = false;
  while (!frontier.empty()) {
    const int cell = frontier.back();
    frontier.pop_back();
    const int row = cell / spec.width;
    const int col = cell % spec.width;
    const int along = vertical ? row : col;
    const int extent = vertical ? spec.height : spec.width;
    near_side |= along == 0;
    far_side |= along == extent - 1;
    if (near_side && far_side) return true;
    for (auto [dr, dc] : kHexNeighbours) {
      const int r = row + dr;
      const int c = col + dc;
      if (r < 0 || r >= spec.height || c < 0 || c >= spec.width) continue;
      const int next = r * spec.width + c;
      if (seen[next] || cells[next] != stone) continue;
      seen[next] = 1;
      frontier.push_back(next);
    }
  }
  return false;
}

}  // namespace

void GameSpec::validate() const {
  if (width < 2 || height < 2) {
    throw ConfigError("board dimensions must be at least 2, got " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
  switch (kind) {
    case GameKind::kTicTacToe:
      if (width != height) throw ConfigError("tictactoe requires a square board");
      if (k_in_row < 1 || k_in_row > width) {
        throw ConfigError("tictactoe win length must lie in [1, " + std::to_string(width) + "]");
      }
      break;
    case GameKind::kConnectFour:
      if (k_in_row < 1 || k_in_row > std::max(width, height)) {
        throw ConfigError("connectfour win length must lie in [1, max(width, height)]");
      }
      break;
    case GameKind::kHex:
      if (width != height) throw ConfigError("hex requires a square board");
      break;
  }
}

std::string GameSpec::token() const {
  std::string out(kind_name(kind));
  out += ':' + std::to_string(width) + 'x' + std::to_string(height);
  if (kind != GameKind::kHex) out += ':' + std::to_string(k_in_row);
  return out;
}

GameSpec parse_game_spec(std::string_view token) {
  std::vector<std::string_view> parts;
  for (std::size_t start = 0;;) {
    const auto colon = token.find(':', start);
    parts.push_back(token.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() < 2 || parts.size() > 3) {
    throw ConfigError("malformed game token '" + std::string(token) +
                      "' (expected kind:WxH[:k])");
  }
  GameSpec spec;
  if (parts[0] == "tictactoe") {
    spec.kind = GameKind::kTicTacToe;
  } else if (parts[0] == "connectfour") {
    spec.kind = GameKind::kConnectFour;
  } else if (parts[0] == "hex") {
    spec.kind = GameKind::kHex;
  } else {
    throw ConfigError("unknown game kind '" + std::string(parts[0]) + "'");
  }
  const auto x = parts[1].find('x');
  if (x == std::string_view::npos) {
    throw ConfigError("malformed board size '" + std::string(parts[1]) + "'");
  }
  spec.width = parse_positive(parts[1].substr(0, x), token);
  spec.height = parse_positive(parts[1].substr(x + 1), token);
  switch (spec.kind) {
    case GameKind::kTicTacToe:
      spec.k_in_row = parts.size() == 3 ? parse_positive(parts[2], token) : spec.width;
      break;
    case GameKind::kConnectFour:
      spec.k_in_row = parts.size() == 3 ? parse_positive(parts[2], token) : 4;
      break;
    case GameKind::kHex:
      if (parts.size() == 3) throw ConfigError("hex takes no win length");
      spec.k_in_row = 0;
      break;
  }
  spec.validate();
  return spec;
}

GameState::GameState(const GameSpec& spec) : spec_(spec) {
  spec_.validate();
  cells_.assign(static_cast<std::size_t>(spec_.cell_count()), Cell::kEmpty);
}

int GameState::target_cell(Move move) const {
  if (is_terminal() || move.index < 0 || move.index >= spec_.move_space()) return -1;
  if (spec_.kind != GameKind::kConnectFour) {
    return cells_[move.index] == Cell::kEmpty ? move.index : -1;
  }
  for (int row = 0; row < spec_.height; ++row) {
    const int cell = row * spec_.width + move.index;
    if (cells_[cell] == Cell::kEmpty) return cell;
  }
  return -1;
}

bool GameState::is_legal(Move move) const { return target_cell(move) >= 0; }

void GameState::legal_moves(std::vector<Move>& out) const {
  out.clear();
  if (is_terminal()) return;
  if (spec_.kind == GameKind::kConnectFour) {
    const int top = (spec_.height - 1) * spec_.width;
    for (int col = 0; col < spec_.width; ++col) {
      if (cells_[top + col] == Cell::kEmpty) out.push_back(Move{col});
    }
    return;
  }
  for (int cell = 0; cell < spec_.cell_count(); ++cell) {
    if (cells_[cell] == Cell::kEmpty) out.push_back(Move{cell});
  }
}

std::vector<Move> GameState::legal_moves() const {
  std::vector<Move> out;
  legal_moves(out);
  return out;
}

int GameState::legal_move_count() const {
  if (is_terminal()) return 0;
  if (spec_.kind == GameKind::kConnectFour) {
    const int top = (spec_.height - 1) * spec_.width;
    return static_cast<int>(std::count(cells_.begin() + top, cells_.end(), Cell::kEmpty));
  }
  return spec_.cell_count() - move_count_;
}

GameState GameState::apply(Move move) const {
  GameState next = *this;
  next.play(move);
  return next;
}

void GameState::play(Move move) {
  const int cell = target_cell(move);
  if (cell < 0) {
    throw ContractViolation("illegal move " + std::to_string(move.index) + " in state " + key());
  }
  place(cell);
}

void GameState::place(int cell) {
  cells_[cell] = stone_of(to_move_);
  ++move_count_;
  const bool won =
      spec_.kind == GameKind::kHex ? completes_hex_chain(cell) : completes_line(cell);
  if (won) winner_ = to_move_;
  to_move_ = opponent(to_move_);
}

bool GameState::completes_line(int cell) const {
  const int row = cell / spec_.width;
  const int col = cell % spec_.width;
  const Cell stone = cells_[cell];
  for (auto [dr, dc] : kLineDirections) {
    const int length = 1 + run_length(spec_, cells_, row, col, dr, dc, stone) +
                       run_length(spec_, cells_, row, col, -dr, -dc, stone);
    if (length >= spec_.k_in_row) return true;
  }
  return false;
}

bool GameState::completes_hex_chain(int cell) const {
  return hex_connects(spec_, cells_, cells_[cell], {cell});
}

int GameState::goal(Role role) const {
  if (!is_terminal()) {
    throw ContractViolation("goal requested for non-terminal state " + key());
  }
  if (!winner_) return kGoalDraw;
  return *winner_ == role ? kGoalWin : kGoalLoss;
}

std::string GameState::key() const {
  std::string out = spec_.token();
  out.reserve(out.size() + cells_.size() + 3);
  out += '|';
  for (Cell c : cells_) {
    out += c == Cell::kEmpty ? '.' : (c == Cell::kP0 ? 'x' : 'o');
  }
  out += '|';
  out += static_cast<char>('0' + index_of(to_move_));
  return out;
}

namespace detail {

std::optional<Role> scan_winner(const GameSpec& spec, const std::vector<Cell>& cells) {
  if (spec.kind == GameKind::kHex) {
    std::vector<int> top;
    std::vector<int> left;
    for (int i = 0; i < spec.width; ++i) {
      if (cells[i] == Cell::kP0) top.push_back(i);
    }
    for (int r = 0; r < spec.height; ++r) {
      if (cells[r * spec.width] == Cell::kP1) left.push_back(r * spec.width);
    }
    if (!top.empty() && hex_connects(spec, cells, Cell::kP0, top)) return Role::kFirst;
    if (!left.empty() && hex_connects(spec, cells, Cell::kP1, left)) return Role::kSecond;
    return std::nullopt;
  }
  // Count every k-long window in the four line directions.
  bool p0 = false;
  bool p1 = false;
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      for (auto [dr, dc] : kLineDirections) {
        const int end_r = r + dr * (spec.k_in_row - 1);
        const int end_c = c + dc * (spec.k_in_row - 1);
        if (end_r < 0 || end_r >= spec.height || end_c < 0 || end_c >= spec.width) continue;
        const Cell first = cells[r * spec.width + c];
        if (first == Cell::kEmpty) continue;
        bool all = true;
        for (int i = 1; i < spec.k_in_row && all; ++i) {
          all = cells[(r + dr * i) * spec.width + c + dc * i] == first;
        }
        if (all) (first == Cell::kP0 ? p0 : p1) = true;
      }
    }
  }
  if (p0 && !p1) return Role::kFirst;
  if (p1 && !p0) return Role::kSecond;
  return std::nullopt;
}

}  // namespace detail

}  // namespace qmgg
