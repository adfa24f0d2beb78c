#include <gtest/gtest.h>

#include <functional>

#include "qmgg/oracle.hpp"
#include "qmgg/search.hpp"

using namespace qmgg;

namespace {

GameState ttt(std::initializer_list<int> moves) {
  GameState s(GameSpec::tictactoe(3));
  for (int m : moves) s.play(Move{m});
  return s;
}

// Exact mean goal for `me` of uniformly random play from `s`, by enumerating
// every continuation with its probability.
double exact_playout_mean(const GameState& s, Role me) {
  if (s.is_terminal()) return s.goal(me);
  const auto moves = s.legal_moves();
  double sum = 0.0;
  for (Move m : moves) sum += exact_playout_mean(s.apply(m), me);
  return sum / static_cast<double>(moves.size());
}

void check_tree(const SearchTree& tree, std::int64_t iterations) {
  EXPECT_EQ(tree.node(0).visits, iterations);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& n = tree.node(static_cast<SearchTree::NodeId>(i));
    std::int64_t child_visits = 0;
    for (std::int32_t c = 0; c < n.child_count; ++c) child_visits += tree.node(n.first_child + c).visits;
    ASSERT_EQ(n.visits, child_visits + n.playouts) << "node " << i;
    if (n.visits > 0) {
      const double mean = n.total_value / static_cast<double>(n.visits);
      ASSERT_GE(mean, 0.0);
      ASSERT_LE(mean, 100.0);
    }
  }
}

}  // namespace

TEST(BudgetTest, Parse) {
  EXPECT_EQ(parse_budget("playouts:1000"), SearchBudget::playouts(1000));
  EXPECT_EQ(parse_budget("ms:50"), SearchBudget::millis(50));
  EXPECT_EQ(parse_budget(SearchBudget::millis(7).token()), SearchBudget::millis(7));
  for (const char* bad : {"1000", "playouts:", "playouts:-1", "seconds:3", "ms:1x"}) {
    EXPECT_THROW(parse_budget(bad), ConfigError) << bad;
  }
}

TEST(PlayoutTest, TerminalInputReturnsGoals) {
  RandomStream rng(1);
  const auto r = random_playout(ttt({0, 3, 1, 4, 2}), rng);
  EXPECT_EQ(r.goal(Role::kFirst), 100);
  EXPECT_EQ(r.goal(Role::kSecond), 0);
}

TEST(PlayoutTest, ForcedWinAlwaysWins) {
  // x x . / x o o / o x o with x to move; the last cell completes the top row.
  const GameState s = ttt({0, 4, 1, 5, 3, 6, 7, 8});
  ASSERT_FALSE(s.is_terminal());
  ASSERT_EQ(s.to_move(), Role::kFirst);
  ASSERT_EQ(exact_playout_mean(s, Role::kFirst), 100.0);
  RandomStream rng(2);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(random_playout(s, rng).goal(Role::kFirst), 100);
}

TEST(PlayoutTest, HexNeverDraws) {
  RandomStream rng(3);
  for (int i = 0; i < 2000; ++i) {
    const auto r = random_playout(GameState(GameSpec::hex(3)), rng);
    EXPECT_NE(r.goals[0], 50);
    EXPECT_EQ(r.goals[0] + r.goals[1], 100);
  }
}

TEST(McsTest, SingleMoveSpendsNothing) {
  const GameState s = ttt({0, 1, 2, 4, 3, 5, 7, 6});
  ASSERT_EQ(s.legal_move_count(), 1);
  RandomStream rng(4);
  McsStats stats;
  EXPECT_EQ(mcs_select(s, SearchBudget::playouts(1000), rng, &stats), Move{8});
  EXPECT_EQ(stats.playouts, 0);
}

TEST(McsTest, ZeroBudgetReturnsFirstMove) {
  RandomStream rng(5);
  McsStats stats;
  EXPECT_EQ(mcs_select(ttt({4}), SearchBudget::playouts(0), rng, &stats), Move{0});
  EXPECT_EQ(stats.playouts, 0);
}

TEST(McsTest, FindsOnlyWinningMove) {
  // x x . / o o . / . x o with x to move: 2 wins at once.
  const GameState s = ttt({0, 3, 1, 4, 7, 8});
  ASSERT_EQ(s.to_move(), Role::kFirst);
  // Exhaustive playout statistics: move 2's mean is 100, the rest are lower.
  std::vector<std::pair<Move, double>> means;
  for (Move m : s.legal_moves()) means.emplace_back(m, exact_playout_mean(s.apply(m), Role::kFirst));
  for (const auto& [m, mean] : means) {
    if (m == Move{2}) EXPECT_EQ(mean, 100.0);
    else EXPECT_LT(mean, 100.0);
  }
  RandomStream rng(6);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(mcs_select(s, SearchBudget::playouts(900), rng), Move{2});
}

TEST(McsTest, RoundRobinFairnessAndExactBudget) {
  RandomStream rng(7);
  for (int p : {1, 3, 10}) {
    const GameState s = ttt({4});
    McsStats stats;
    mcs_select(s, SearchBudget::playouts(8 * p), rng, &stats);
    EXPECT_EQ(stats.playouts, 8 * p);
    for (auto v : stats.visits) EXPECT_EQ(v, p);
  }
  McsStats stats;
  mcs_select(ttt({}), SearchBudget::playouts(13), rng, &stats);
  EXPECT_EQ(stats.playouts, 13);
  EXPECT_EQ(stats.visits.front(), 2);
  EXPECT_EQ(stats.visits.back(), 1);
}

TEST(McsTest, Deterministic) {
  const GameState s = ttt({0, 4});
  McsStats a, b;
  RandomStream r1(9), r2(9);
  EXPECT_EQ(mcs_select(s, SearchBudget::playouts(500), r1, &a),
            mcs_select(s, SearchBudget::playouts(500), r2, &b));
  EXPECT_EQ(a.score, b.score);
}

TEST(McsTest, WallClockBudgetTerminates) {
  RandomStream rng(10);
  McsStats stats;
  const Move m = mcs_select(ttt({}), SearchBudget::millis(5), rng, &stats);
  EXPECT_GE(m.index, 0);
  EXPECT_GT(stats.playouts, 0);
}

TEST(UctTest, Examples) {
  // o to move with cells 6 and 8 free; node 1 is move 6, node 2 is move 8.
  const GameState two = ttt({0, 1, 2, 4, 3, 5, 7});
  ASSERT_EQ(two.legal_move_count(), 2);
  for (Role me : {Role::kFirst, Role::kSecond}) {
    SearchTree tree(two);
    tree.expand(0, two);
    EXPECT_EQ(uct_minmax(tree, 0, me), 1);  // unvisited first, in move order
    tree.node(1).visits = 1;
    tree.node(1).total_value = 100;
    EXPECT_EQ(uct_minmax(tree, 0, me), 2);  // the other one is still unvisited
    tree.node(2).visits = 1;
    tree.node(2).total_value = 0;
    tree.node(0).visits = 2;
    const bool my_turn = two.to_move() == me;
    EXPECT_EQ(uct_minmax(tree, 0, me), my_turn ? 1 : 2);
    EXPECT_EQ(uct_minmax(tree, 0, me, UctParams::verbatim()), my_turn ? 1 : 2);
  }
}

TEST(UctTest, LeafRejected) {
  SearchTree tree(ttt({}));
  EXPECT_THROW(uct_minmax(tree, 0, Role::kFirst), ContractViolation);
}

TEST(MctsTest, VisitConservationAndExactIterations) {
  RandomStream rng(11);
  for (const auto& spec : {GameSpec::tictactoe(3), GameSpec::connect_four(4, 4, 4), GameSpec::hex(3)}) {
    for (std::int64_t budget : {1, 2, 17, 500, 3000}) {
      GameState s(spec);
      MctsSearch search(s, s.to_move());
      EXPECT_EQ(search.run(SearchBudget::playouts(budget), rng), budget);
      check_tree(search.tree(), budget);
    }
  }
  // Terminal nodes inside the tree are played out in place.
  const GameState near_end = ttt({0, 3, 1, 4});
  MctsSearch search(near_end, Role::kFirst);
  search.run(SearchBudget::playouts(2000), rng);
  check_tree(search.tree(), 2000);
  EXPECT_EQ(search.best_move(), Move{2});
}

TEST(MctsTest, SingleMoveAndTerminal) {
  RandomStream rng(12);
  EXPECT_EQ(mcts_select(ttt({0, 1, 2, 4, 3, 5, 7, 6}), SearchBudget::playouts(100), rng, Role::kFirst),
            Move{8});
  EXPECT_THROW(mcts_select(ttt({0, 3, 1, 4, 2}), SearchBudget::playouts(100), rng, Role::kSecond),
               ContractViolation);
}

TEST(MctsTest, BlocksImmediateThreat) {
  // x x . / . o . / . . . with o to move must take 2.
  const GameState s = ttt({0, 4, 1});
  RandomStream rng(13);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(mcts_select(s, SearchBudget::playouts(5000), rng, Role::kSecond), Move{2});
  }
}

TEST(MctsTest, Deterministic) {
  RandomStream a(14), b(14);
  MctsSearch s1(ttt({4}), Role::kSecond), s2(ttt({4}), Role::kSecond);
  s1.run(SearchBudget::playouts(3000), a);
  s2.run(SearchBudget::playouts(3000), b);
  ASSERT_EQ(s1.tree().size(), s2.tree().size());
  for (std::size_t i = 0; i < s1.tree().size(); ++i) {
    const auto id = static_cast<SearchTree::NodeId>(i);
    ASSERT_EQ(s1.tree().node(id).visits, s2.tree().node(id).visits);
    ASSERT_EQ(s1.tree().node(id).total_value, s2.tree().node(id).total_value);
  }
  EXPECT_EQ(s1.best_move(), s2.best_move());
}

TEST(MctsTest, AvoidsLosingMovesOnSampledPositions) {
  const GameSpec spec = GameSpec::tictactoe(3);
  MinimaxOracle oracle(spec);
  RandomStream gen(15);
  int checked = 0;
  while (checked < 25) {
    GameState s(spec);
    const int depth = static_cast<int>(gen.below(7));
    for (int d = 0; d < depth && !s.is_terminal(); ++d) {
      const auto moves = s.legal_moves();
      s.play(moves[gen.below(moves.size())]);
    }
    if (s.is_terminal() || oracle.value_for_mover(s) == kGoalLoss) continue;
    RandomStream rng = gen.split(static_cast<std::uint64_t>(checked));
    const Move m = mcts_select(s, SearchBudget::playouts(20000), rng, s.to_move());
    EXPECT_FALSE(oracle.is_losing_move(s, m)) << s.key() << " move " << m.index;
    ++checked;
  }
}

TEST(OracleTest, GameValues) {
  MinimaxOracle ttt_oracle(GameSpec::tictactoe(3));
  EXPECT_EQ(ttt_oracle.value(GameState(GameSpec::tictactoe(3))), kGoalDraw);
  MinimaxOracle hex_oracle(GameSpec::hex(3));
  EXPECT_EQ(hex_oracle.value(GameState(GameSpec::hex(3))), kGoalWin);
  EXPECT_EQ(count_reachable_states(GameSpec::tictactoe(3)), 5478);
  EXPECT_THROW(count_reachable_states(GameSpec::tictactoe(5), 100000), ResourceError);

  // Optimal replies to a corner opening include the centre only.
  const GameState corner = ttt({0});
  EXPECT_EQ(ttt_oracle.optimal_moves(corner), std::vector<Move>{Move{4}});
}

TEST(OracleTest, AgreesWithIndependentNegamax) {
  // Plain negamax without memo on a 3x3 Hex board (9! orderings at most).
  std::function<int(const GameState&)> negamax = [&](const GameState& s) -> int {
    if (s.is_terminal()) return s.goal(s.to_move());
    int best = -1;
    for (Move m : s.legal_moves()) best = std::max(best, 100 - negamax(s.apply(m)));
    return best;
  };
  MinimaxOracle oracle(GameSpec::hex(3));
  GameState s(GameSpec::hex(3));
  for (Move m : s.legal_moves()) {
    const GameState child = s.apply(m);
    EXPECT_EQ(oracle.move_value(s, m), 100 - negamax(child)) << m.index;
  }
}
