#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "qmgg/harness.hpp"
#include "qmgg/reporting.hpp"

using namespace qmgg;

namespace {

ExperimentConfig small_config(std::int64_t l, int reps = 3) {
  ExperimentConfig c;
  c.game = GameSpec::tictactoe(3);
  c.learner = AgentSpec::qplayer({}, EpsilonSchedule::cosine(0.5, 0, std::max<std::int64_t>(l, 1)));
  c.opponent = AgentSpec::random();
  c.learning_matches = l;
  c.repetitions = reps;
  c.seed = 17;
  c.window = 100;
  c.baseline_matches = 2000;
  return c;
}

}  // namespace

TEST(PlayMatchTest, LengthAndParity) {
  RandomAgent a, b;
  RandomStream rng(1);
  for (std::int64_t m = 0; m < 200; ++m) {
    const auto out = play_match(a, b, GameSpec::tictactoe(3), rng, m, false, true);
    EXPECT_LE(out.result.move_count, 9);
    EXPECT_EQ(out.result.moves.size(), static_cast<std::size_t>(out.result.move_count));
    EXPECT_EQ(out.result.first_mover, m % 2 == 0 ? 0 : 1);
    EXPECT_EQ(out.result.goals[0] + out.result.goals[1], 100);
  }
}

TEST(PlayMatchTest, RecordsChainAndEndAtTerminal) {
  QLearningAgent learner(AgentSpec::qplayer({}, EpsilonSchedule::cosine(0.5, 0, 10)));
  RandomAgent opponent;
  RandomStream rng(2);
  for (std::int64_t m = 0; m < 50; ++m) {
    const auto out = play_match(learner, opponent, GameSpec::tictactoe(3), rng, m, true);
    ASSERT_TRUE(out.records[0]);
    EXPECT_FALSE(out.records[1]);
    const auto& rec = *out.records[0];
    ASSERT_FALSE(rec.decisions.empty());
    for (std::size_t i = 0; i + 1 < rec.decisions.size(); ++i) {
      EXPECT_EQ(rec.decisions[i].next_key, rec.decisions[i + 1].state_key);
      EXPECT_NE(rec.decisions[i].next_key, rec.terminal_key);
    }
    EXPECT_EQ(rec.decisions.back().next_key, rec.terminal_key);
    EXPECT_EQ(rec.terminal_goal, out.result.goals[0]);
    // The learner's own states all have it to move.
    const char role_digit = static_cast<char>('0' + (m % 2 == 0 ? 0 : 1));
    for (const auto& d : rec.decisions) EXPECT_EQ(d.state_key.back(), role_digit);
  }
  EXPECT_EQ(learner.updates(), 50);
}

TEST(PlayMatchTest, NoLearningLeavesTablesUnchanged) {
  QLearningAgent learner(AgentSpec::qplayer({}, EpsilonSchedule::cosine(0.5, 0, 100)));
  RandomAgent opponent;
  RandomStream rng(3);
  for (std::int64_t m = 0; m < 100; ++m) play_match(learner, opponent, GameSpec::tictactoe(3), rng, m, true);
  const RoleTables before = learner.tables();
  for (std::int64_t m = 0; m < 100; ++m) play_match(learner, opponent, GameSpec::tictactoe(3), rng, m, false);
  EXPECT_EQ(learner.tables()[0], before[0]);
  EXPECT_EQ(learner.tables()[1], before[1]);
  EXPECT_EQ(learner.updates(), 100);
}

TEST(SeriesTest, WindowsAndPhase) {
  WinRateSeries s;
  s.window = 4;
  s.learning_matches = 8;
  for (int m = 0; m < 12; ++m) {
    MatchResult r;
    r.match_index = m;
    r.goals = m % 3 == 0 ? std::array<int, 2>{100, 0} : std::array<int, 2>{50, 50};
    s.matches.push_back(r);
  }
  const auto points = s.points();
  ASSERT_EQ(points.size(), 3u);
  EXPECT_EQ(points[0].match, 4);
  EXPECT_DOUBLE_EQ(points[0].win_rate, 0.5);  // matches 0 and 3
  EXPECT_EQ(points[0].draws, 2);
  EXPECT_FALSE(points[1].exploitation);
  EXPECT_TRUE(points[2].exploitation);
}

TEST(ExperimentTest, ConfigValidation) {
  auto c = small_config(100);
  EXPECT_EQ(c.exploitation_matches(), 50);
  c.learning_matches = 101;
  EXPECT_EQ(c.exploitation_matches(), 51);  // total = ceil(1.5 l)
  c.repetitions = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config(100);
  c.learner = AgentSpec::random();
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ExperimentTest, PhaseAccountingAndAlternation) {
  const auto c = small_config(1000, 2);
  const auto result = run_experiment(c, Execution::kSerial);
  ASSERT_EQ(result.repetitions.size(), 2u);
  for (const auto& rep : result.repetitions) {
    EXPECT_EQ(rep.learning_updates, 1000);
    EXPECT_EQ(rep.series.matches.size(), 1500u);
    int first = 0;
    for (const auto& m : rep.series.matches) first += m.first_mover == 0;
    EXPECT_EQ(first, 750);
    EXPECT_EQ(rep.exploitation.total(), 500);
    const auto points = rep.series.points();
    ASSERT_EQ(points.size(), 15u);
    for (const auto& p : points) EXPECT_EQ(p.exploitation, p.match > 1000);
  }
}

TEST(ExperimentTest, SerialEqualsParallelAndReproducible) {
  const auto c = small_config(2000, 4);
  const auto serial = run_experiment(c, Execution::kSerial);
  const auto parallel = run_experiment(c, Execution::kParallel);
  const auto again = run_experiment(c, Execution::kParallel);
  ASSERT_EQ(serial.repetitions.size(), parallel.repetitions.size());
  for (std::size_t r = 0; r < serial.repetitions.size(); ++r) {
    EXPECT_EQ(*serial.repetitions[r].tables, *parallel.repetitions[r].tables);
    EXPECT_EQ(serial.repetitions[r].convergence_win_rate, parallel.repetitions[r].convergence_win_rate);
    EXPECT_EQ(parallel.repetitions[r].convergence_win_rate, again.repetitions[r].convergence_win_rate);
  }
  EXPECT_EQ(serial.mean_convergence, parallel.mean_convergence);
  EXPECT_EQ(serial.convergence_variance, parallel.convergence_variance);

  const auto dir = std::filesystem::temp_directory_path() / "qmgg_harness_test";
  write_aggregate(serial, dir / "a.csv");
  write_aggregate(again, dir / "b.csv");
  std::ifstream fa(dir / "a.csv"), fb(dir / "b.csv");
  const std::string sa((std::istreambuf_iterator<char>(fa)), {});
  const std::string sb((std::istreambuf_iterator<char>(fb)), {});
  EXPECT_EQ(sa, sb);
  std::filesystem::remove_all(dir);
}

TEST(ExperimentTest, RepetitionsDiffer) {
  const auto result = run_experiment(small_config(500, 2), Execution::kSerial);
  EXPECT_NE(*result.repetitions[0].tables, *result.repetitions[1].tables);
}

TEST(ExperimentTest, UntrainedBaselineIsEvenOnDecisiveGames) {
  const auto result = run_experiment(small_config(0, 2), Execution::kSerial);
  Tally t;
  for (const auto& rep : result.repetitions) {
    EXPECT_EQ(rep.learning_updates, 0);
    EXPECT_EQ(rep.exploitation.total(), 2000);
    t.wins += rep.exploitation.wins;
    t.losses += rep.exploitation.losses;
    t.draws += rep.exploitation.draws;
  }
  EXPECT_NEAR(t.decisive_win_rate(), 0.5, 0.03);
}

TEST(ExperimentTest, ConvergenceGrowsWithLearningLength) {
  std::vector<double> rates;
  for (std::int64_t l : {5000, 10000, 20000, 30000}) {
    auto c = small_config(l, 5);
    c.window = 500;
    c.keep_tables = false;
    rates.push_back(run_experiment(c).mean_convergence);
  }
  for (std::size_t i = 1; i < rates.size(); ++i) EXPECT_GE(rates[i], rates[i - 1] - 0.015) << i;
  EXPECT_GT(rates.back(), rates.front());
}

TEST(TournamentTest, SymmetryAndShape) {
  const std::vector<AgentSpec> agents{AgentSpec::random(), AgentSpec::mcs(SearchBudget::playouts(200)),
                                      AgentSpec::random()};
  const auto m = run_tournament(agents, GameSpec::tictactoe(3), 100, 5, Execution::kSerial);
  ASSERT_EQ(m.labels.size(), 3u);
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_FALSE(m.wins[r][r]);
    for (std::size_t c = 0; c < 3; ++c) {
      if (r == c) continue;
      ASSERT_TRUE(m.wins[r][c] && m.wins[c][r] && m.draws[r][c]);
      EXPECT_GE(*m.wins[r][c], 0.0);
      EXPECT_LE(*m.wins[r][c], 1.0);
      EXPECT_DOUBLE_EQ(*m.wins[r][c] + *m.wins[c][r] + *m.draws[r][c], 1.0);
      EXPECT_EQ(*m.draws[r][c], *m.draws[c][r]);
    }
  }
  EXPECT_GT(*m.wins[0][1], 0.7);  // MCS beats Random
  const auto parallel = run_tournament(agents, GameSpec::tictactoe(3), 100, 5, Execution::kParallel);
  EXPECT_EQ(parallel.wins, m.wins);
  EXPECT_EQ(parallel.draws, m.draws);
}

TEST(TournamentTest, TwoRandomsAreEvenOnDecisiveGames) {
  const auto m = run_tournament({AgentSpec::random(), AgentSpec::random()}, GameSpec::tictactoe(3),
                                2000, 9);
  const double decisive = *m.wins[0][1] / (*m.wins[0][1] + *m.wins[1][0]);
  EXPECT_NEAR(decisive, 0.5, 0.1);
}

TEST(TournamentTest, Errors) {
  const auto spec = GameSpec::tictactoe(3);
  EXPECT_THROW(run_tournament({AgentSpec::random()}, spec, 10, 1), ConfigError);
  EXPECT_THROW(run_tournament({AgentSpec::random(), AgentSpec::qplayer({}, EpsilonSchedule::cosine(0.5, 0, 1))},
                              spec, 10, 1),
               ConfigError);
  auto frozen = AgentSpec::qplayer({}, EpsilonSchedule::cosine(0.5, 0, 1));
  frozen.snapshot = "/nonexistent/qmgg/table";
  EXPECT_THROW(run_tournament({AgentSpec::random(), frozen}, spec, 10, 1), ConfigError);
}

TEST(TournamentTest, FrozenLearnerPlaysFromSnapshot) {
  auto c = small_config(3000, 1);
  const auto result = run_experiment(c, Execution::kSerial);
  const auto dir = std::filesystem::temp_directory_path() / "qmgg_frozen_test";
  save_role_tables(*result.repetitions[0].tables, c.game, {}, 3000, dir / "q");
  auto frozen = AgentSpec::qplayer({}, EpsilonSchedule::cosine(0.5, 0, 1));
  frozen.snapshot = (dir / "q").string();
  const Tally t = compete(frozen, AgentSpec::random(), c.game, 400, 3);
  EXPECT_GT(t.win_rate(), 0.6);
  std::filesystem::remove_all(dir);
}

TEST(EpsilonComparisonTest, RunsEachVariant) {
  const auto cmp = epsilon_comparison_experiment(
      GameSpec::tictactoe(3),
      {EpsilonSchedule::cosine(0.5, 0, 1), EpsilonSchedule::fixed(0.0, 1)}, 2000, 2, 4, 100);
  ASSERT_EQ(cmp.results.size(), 2u);
  ASSERT_EQ(cmp.final_win_rates.size(), 2u);
  EXPECT_EQ(cmp.results[0].config.learner.schedule->l, 2000);
  // eps = 0 with an empty table starts out as a random player.
  EXPECT_EQ(cmp.results[1].config.learner.schedule->b, 0.0);
}
