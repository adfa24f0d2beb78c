#include "qmgg/search.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>

namespace qmgg {

namespace {

using Clock = std::chrono::steady_clock;

class BudgetTracker {
 public:
  explicit BudgetTracker(const SearchBudget& budget)
      : budget_(budget), deadline_(Clock::now() + std::chrono::milliseconds(budget.amount)) {}

  bool exhausted(std::int64_t spent) const {
    if (budget_.mode == SearchBudget::Mode::kPlayouts) return spent >= budget_.amount;
    return Clock::now() >= deadline_;
  }

 private:
  SearchBudget budget_;
  Clock::time_point deadline_;
};

}  // namespace

std::string SearchBudget::token() const {
  return (mode == Mode::kPlayouts ? "playouts:" : "ms:") + std::to_string(amount);
}

SearchBudget parse_budget(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("malformed budget '" + std::string(text) + "' (expected playouts:N or ms:N)");
  }
  const auto kind = text.substr(0, colon);
  const auto number = text.substr(colon + 1);
  std::int64_t amount = 0;
  auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), amount);
  if (ec != std::errc{} || ptr != number.data() + number.size() || amount < 0) {
    throw ConfigError("invalid budget amount in '" + std::string(text) + "'");
  }
  if (kind == "playouts") return SearchBudget::playouts(amount);
  if (kind == "ms") return SearchBudget::millis(amount);
  throw ConfigError("unknown budget kind '" + std::string(kind) + "'");
}

PlayoutResult random_playout(const GameState& state, RandomStream& rng) {
  GameState scratch = state;
  std::vector<Move> moves;
  while (!scratch.is_terminal()) {
    scratch.legal_moves(moves);
    scratch.play(moves[rng.below(moves.size())]);
  }
  return {{scratch.goal(Role::kFirst), scratch.goal(Role::kSecond)}};
}

Move mcs_select(const GameState& state, const SearchBudget& budget, RandomStream& rng,
                McsStats* stats) {
  const std::vector<Move> moves = state.legal_moves();
  if (moves.empty()) throw ContractViolation("mcs_select on terminal state " + state.key());

  const std::size_t n = moves.size();
  std::vector<double> score(n, 0.0);
  std::vector<std::int64_t> visits(n, 0);
  std::int64_t spent = 0;
  Move selected = moves.front();

  if (n > 1) {
    const Role me = state.to_move();
    const BudgetTracker tracker(budget);
    for (std::size_t i = 0; !tracker.exhausted(spent); i = (i + 1) % n) {
      score[i] += random_playout(state.apply(moves[i]), rng).goal(me);
      ++visits[i];
      ++spent;
    }
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (visits[i] == 0) continue;
      const double mean = score[i] / static_cast<double>(visits[i]);
      if (mean > best) {
        best = mean;
        selected = moves[i];
      }
    }
  }
  if (stats) *stats = McsStats{moves, std::move(score), std::move(visits), spent};
  return selected;
}

SearchTree::SearchTree(const GameState& root_state) : root_state_(root_state) {
  Node root;
  root.mover = root_state.to_move();
  root.terminal = root_state.is_terminal();
  nodes_.push_back(root);
}

void SearchTree::expand(NodeId id, const GameState& state) {
  std::vector<Move> moves;
  state.legal_moves(moves);
  const auto first = static_cast<NodeId>(nodes_.size());
  for (Move move : moves) {
    GameState child = state.apply(move);
    Node n;
    n.move = move;
    n.parent = id;
    n.mover = child.to_move();
    n.terminal = child.is_terminal();
    nodes_.push_back(n);
  }
  Node& parent = node(id);
  parent.first_child = moves.empty() ? kNone : first;
  parent.child_count = static_cast<std::int32_t>(moves.size());
}

SearchTree::NodeId uct_minmax(const SearchTree& tree, SearchTree::NodeId id, Role my_role,
                              const UctParams& uct_params) {
  const auto& parent = tree.node(id);
  if (parent.child_count == 0) throw ContractViolation("uct_minmax on a leaf");
  const bool maximise = parent.mover == my_role;
  const double log_term = std::log(static_cast<double>(parent.visits) + 1.0);

  SearchTree::NodeId selected = SearchTree::kNone;
  double best = maximise ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
  for (std::int32_t i = 0; i < parent.child_count; ++i) {
    const SearchTree::NodeId child_id = parent.first_child + i;
    const auto& child = tree.node(child_id);
    if (child.visits == 0) return child_id;
    const double visits = static_cast<double>(child.visits);
    const double mean = child.total_value / visits;
    const double bonus = uct_params.exploration * std::sqrt(log_term / visits);
    const double uct = (maximise || !uct_params.optimistic_min) ? mean + bonus : mean - bonus;
    if (maximise ? uct > best : uct < best) {
      best = uct;
      selected = child_id;
    }
  }
  return selected;
}

MctsSearch::MctsSearch(const GameState& root, Role my_role, const UctParams& uct_params)
    : tree_(root), my_role_(my_role), uct_params_(uct_params) {}

void MctsSearch::iterate(RandomStream& rng) {
  GameState state = tree_.root_state();
  SearchTree::NodeId id = 0;
  path_.clear();
  path_.push_back(id);
  while (!tree_.is_leaf(id)) {
    id = uct_minmax(tree_, id, my_role_, uct_params_);
    state.play(tree_.node(id).move);
    path_.push_back(id);
  }
  if (!tree_.node(id).terminal) {
    tree_.expand(id, state);
    id = uct_minmax(tree_, id, my_role_, uct_params_);
    state.play(tree_.node(id).move);
    path_.push_back(id);
  }
  const double bonus = random_playout(state, rng).goal(my_role_);
  ++tree_.node(id).playouts;
  for (SearchTree::NodeId visited : path_) {
    auto& node = tree_.node(visited);
    ++node.visits;
    node.total_value += bonus;
  }
}

std::int64_t MctsSearch::run(const SearchBudget& budget, RandomStream& rng) {
  const BudgetTracker tracker(budget);
  std::int64_t done = 0;
  while (!tracker.exhausted(done)) {
    iterate(rng);
    ++done;
  }
  return done;
}

Move MctsSearch::best_move() const {
  const auto& root = tree_.node(0);
  if (root.child_count == 0) {
    const auto moves = tree_.root_state().legal_moves();
    if (moves.empty()) throw ContractViolation("best_move on terminal root");
    return moves.front();
  }
  Move selected = tree_.node(root.first_child).move;
  double best = -1.0;
  for (std::int32_t i = 0; i < root.child_count; ++i) {
    const auto& child = tree_.node(root.first_child + i);
    if (child.visits == 0) continue;
    const double mean = child.total_value / static_cast<double>(child.visits);
    if (mean > best) {
      best = mean;
      selected = child.move;
    }
  }
  return selected;
}

Move mcts_select(const GameState& state, const SearchBudget& budget, RandomStream& rng,
                 Role my_role, const UctParams& uct_params) {
  if (state.is_terminal()) throw ContractViolation("mcts_select on terminal state " + state.key());
  if (state.legal_move_count() == 1) return state.legal_moves().front();
  MctsSearch search(state, my_role, uct_params);
  search.run(budget, rng);
  return search.best_move();
}

}  // namespace qmgg
