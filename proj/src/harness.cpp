#include "qmgg/harness.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

namespace qmgg {

namespace {

double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

// Pending (state, move) of each role, waiting for that role's next turn.
struct PendingDecision {
  std::string state_key;
  Move move;
};

}  // namespace

MatchOutcome play_match(Agent& agent0, Agent& agent1, const GameSpec& spec, RandomStream& rng,
                        std::int64_t m, bool learning, bool log_moves) {
  const int first = (m % 2 == 0) ? 0 : 1;
  std::array<Agent*, 2> by_agent{&agent0, &agent1};
  // Agent playing each role.
  const std::array<int, 2> agent_of_role{first, 1 - first};
  const MatchContext context{m, learning};

  MatchOutcome outcome;
  outcome.result.match_index = m;
  outcome.result.first_mover = first;
  for (int a = 0; a < 2; ++a) {
    if (by_agent[a]->learns()) outcome.records[a].emplace();
  }
  std::array<std::optional<PendingDecision>, 2> pending;  // per role

  GameState state(spec);
  while (!state.is_terminal()) {
    const Role role = state.to_move();
    const int agent = agent_of_role[index_of(role)];
    auto& record = outcome.records[agent];
    std::string key;
    if (record) {
      key = state.key();
      if (auto& p = pending[index_of(role)]) {
        record->decisions.push_back({std::move(p->state_key), p->move, key});
        p.reset();
      }
    }
    const Move move = by_agent[agent]->select(state, context, rng);
    if (record) pending[index_of(role)] = PendingDecision{std::move(key), move};
    if (log_moves) outcome.result.moves.push_back(move);
    state.play(move);
  }

  const std::string terminal_key = state.key();
  for (int r = 0; r < 2; ++r) {
    const Role role = role_from_index(r);
    const int agent = agent_of_role[r];
    outcome.result.goals[agent] = state.goal(role);
    auto& record = outcome.records[agent];
    if (!record) continue;
    if (auto& p = pending[r]) {
      record->decisions.push_back({std::move(p->state_key), p->move, terminal_key});
    }
    record->terminal_key = terminal_key;
    record->terminal_goal = state.goal(role);
  }
  outcome.result.move_count = state.move_count();

  if (learning) {
    for (int r = 0; r < 2; ++r) {
      const int agent = agent_of_role[r];
      if (outcome.records[agent]) by_agent[agent]->learn(role_from_index(r), *outcome.records[agent]);
    }
  }
  return outcome;
}

Outcome outcome_for(const MatchResult& result, int agent) {
  const int goal = result.goals[agent];
  if (goal == kGoalWin) return Outcome::kWin;
  if (goal == kGoalLoss) return Outcome::kLoss;
  return Outcome::kDraw;
}

std::vector<SeriesPoint> WinRateSeries::points() const {
  std::vector<SeriesPoint> out;
  const auto n = static_cast<std::int64_t>(matches.size());
  for (std::int64_t start = 0; start + window <= n; start += window) {
    SeriesPoint p;
    p.match = start + window;
    p.exploitation = start >= learning_matches;
    for (std::int64_t i = start; i < start + window; ++i) {
      switch (outcome_for(matches[static_cast<std::size_t>(i)], 0)) {
        case Outcome::kWin: ++p.wins; break;
        case Outcome::kDraw: ++p.draws; break;
        case Outcome::kLoss: ++p.losses; break;
      }
    }
    p.win_rate = static_cast<double>(p.wins) / window;
    out.push_back(p);
  }
  return out;
}

std::int64_t ExperimentConfig::exploitation_matches() const {
  if (learning_matches == 0) return baseline_matches;
  // ceil(1.5 l) - l
  return (learning_matches + 1) / 2;
}

void ExperimentConfig::validate() const {
  game.validate();
  learner.validate();
  if (!learner.is_learner()) throw ConfigError("the learner must be qplayer or qmplayer");
  opponent.validate();
  if (learning_matches < 0) throw ConfigError("learning matches must be non-negative");
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (window < 1) throw ConfigError("window must be positive");
  if (learning_matches == 0 && baseline_matches < 1) {
    throw ConfigError("baseline matches must be positive when nothing is learned");
  }
}

RepetitionResult run_repetition(const ExperimentConfig& config, int repetition) {
  const RandomStream rep_rng = RandomStream(config.seed).split(static_cast<std::uint64_t>(repetition));
  auto learner = make_agent(config.learner, config.game);
  auto opponent = make_agent(config.opponent, config.game);

  RepetitionResult result;
  result.series.window = config.window;
  result.series.learning_matches = config.learning_matches;
  const std::int64_t total = config.total_matches();
  result.series.matches.reserve(static_cast<std::size_t>(total));
  for (std::int64_t m = 0; m < total; ++m) {
    RandomStream match_rng = rep_rng.split(static_cast<std::uint64_t>(m));
    const bool learning = m < config.learning_matches;
    auto outcome = play_match(*learner, *opponent, config.game, match_rng, m, learning);
    if (!learning) {
      switch (outcome_for(outcome.result, 0)) {
        case Outcome::kWin: ++result.exploitation.wins; break;
        case Outcome::kDraw: ++result.exploitation.draws; break;
        case Outcome::kLoss: ++result.exploitation.losses; break;
      }
    }
    result.series.matches.push_back(std::move(outcome.result));
  }
  result.convergence_win_rate = result.exploitation.win_rate();
  if (auto* q = dynamic_cast<QLearningAgent*>(learner.get())) {
    result.learning_updates = q->updates();
    if (config.keep_tables) result.tables = std::move(q->tables());
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config, Execution execution) {
  config.validate();
  ExperimentResult out;
  out.config = config;
  out.repetitions.resize(static_cast<std::size_t>(config.repetitions));

  if (execution == Execution::kSerial) {
    for (int rep = 0; rep < config.repetitions; ++rep) {
      out.repetitions[static_cast<std::size_t>(rep)] = run_repetition(config, rep);
    }
  } else {
    // Exceptions must not escape an OpenMP region; capture and rethrow.
    std::vector<std::exception_ptr> errors(out.repetitions.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (int rep = 0; rep < config.repetitions; ++rep) {
      try {
        out.repetitions[static_cast<std::size_t>(rep)] = run_repetition(config, rep);
      } catch (...) {
        errors[static_cast<std::size_t>(rep)] = std::current_exception();
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<double> convergence;
  std::vector<std::vector<SeriesPoint>> per_rep;
  for (const auto& rep : out.repetitions) {
    convergence.push_back(rep.convergence_win_rate);
    per_rep.push_back(rep.series.points());
  }
  for (double c : convergence) out.mean_convergence += c;
  out.mean_convergence /= static_cast<double>(convergence.size());
  out.convergence_variance = sample_variance(convergence);

  const std::size_t n_points = per_rep.front().size();
  for (std::size_t i = 0; i < n_points; ++i) {
    std::vector<double> rates;
    for (const auto& pts : per_rep) rates.push_back(pts[i].win_rate);
    AggregatePoint p;
    p.match = per_rep.front()[i].match;
    p.exploitation = per_rep.front()[i].exploitation;
    for (double r : rates) p.mean_win_rate += r;
    p.mean_win_rate /= static_cast<double>(rates.size());
    p.variance = sample_variance(rates);
    out.aggregate.push_back(p);
  }
  return out;
}

TournamentMatrix run_tournament(const std::vector<AgentSpec>& agents, const GameSpec& spec,
                                std::int64_t n_matches, std::uint64_t seed, Execution execution) {
  if (agents.size() < 2) throw ConfigError("a tournament needs at least two agents");
  if (n_matches < 1) throw ConfigError("a tournament needs at least one match per pair");
  spec.validate();

  std::vector<std::unique_ptr<Agent>> players;
  for (const auto& a : agents) {
    if (a.is_learner() && !a.snapshot) {
      throw ConfigError(a.label() + " plays frozen in a tournament and needs a Q-table snapshot");
    }
    players.push_back(make_agent(a, spec));
  }

  TournamentMatrix matrix;
  matrix.agents = agents;
  matrix.matches = n_matches;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    std::string label = agents[i].label();
    const auto same = std::count_if(agents.begin(), agents.begin() + static_cast<std::ptrdiff_t>(i),
                                     [&](const AgentSpec& a) { return a.label() == agents[i].label(); });
    if (same > 0) label += "#" + std::to_string(same + 1);
    matrix.labels.push_back(label);
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t r = 0; r < agents.size(); ++r) {
    for (std::size_t c = r + 1; c < agents.size(); ++c) pairs.emplace_back(r, c);
  }
  const auto jobs = static_cast<std::int64_t>(pairs.size()) * n_matches;
  // Per job: goals of (row agent, column agent).
  std::vector<std::array<int, 2>> goals(static_cast<std::size_t>(jobs));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  const RandomStream root(seed);

  auto run_job = [&](std::int64_t job) {
    const auto& [row, col] = pairs[static_cast<std::size_t>(job / n_matches)];
    const std::int64_t m = job % n_matches;
    RandomStream rng = root.split(static_cast<std::uint64_t>(job / n_matches))
                           .split(static_cast<std::uint64_t>(m));
    const auto outcome = play_match(*players[row], *players[col], spec, rng, m, false);
    goals[static_cast<std::size_t>(job)] = outcome.result.goals;
  };

  if (execution == Execution::kSerial) {
    for (std::int64_t job = 0; job < jobs; ++job) run_job(job);
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t job = 0; job < jobs; ++job) {
      try {
        run_job(job);
      } catch (...) {
        errors[static_cast<std::size_t>(job)] = std::current_exception();
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  const std::size_t k = agents.size();
  matrix.wins.assign(k, std::vector<std::optional<double>>(k));
  matrix.draws.assign(k, std::vector<std::optional<double>>(k));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [row, col] = pairs[p];
    std::int64_t row_wins = 0;
    std::int64_t col_wins = 0;
    std::int64_t draws = 0;
    for (std::int64_t m = 0; m < n_matches; ++m) {
      const auto& g = goals[p * static_cast<std::size_t>(n_matches) + static_cast<std::size_t>(m)];
      if (g[0] == kGoalWin) {
        ++row_wins;
      } else if (g[1] == kGoalWin) {
        ++col_wins;
      } else {
        ++draws;
      }
    }
    const auto n = static_cast<double>(n_matches);
    matrix.wins[row][col] = static_cast<double>(col_wins) / n;
    matrix.wins[col][row] = static_cast<double>(row_wins) / n;
    matrix.draws[row][col] = matrix.draws[col][row] = static_cast<double>(draws) / n;
  }
  return matrix;
}

Tally compete(const AgentSpec& agent0, const AgentSpec& agent1, const GameSpec& spec,
              std::int64_t n_matches, std::uint64_t seed, Execution execution) {
  const auto matrix = run_tournament({agent0, agent1}, spec, n_matches, seed, execution);
  Tally t;
  // Row 1 / column 0 holds agent0's wins against agent1.
  t.wins = std::llround(*matrix.wins[1][0] * static_cast<double>(n_matches));
  t.losses = std::llround(*matrix.wins[0][1] * static_cast<double>(n_matches));
  t.draws = n_matches - t.wins - t.losses;
  return t;
}

EpsilonComparison epsilon_comparison_experiment(const GameSpec& spec,
                                                const std::vector<EpsilonSchedule>& variants,
                                                std::int64_t l, int repetitions,
                                                std::uint64_t seed, int window,
                                                Execution execution) {
  EpsilonComparison out;
  out.variants = variants;
  for (const auto& schedule : variants) {
    ExperimentConfig config;
    config.game = spec;
    config.learner = AgentSpec::qplayer(LearningParams{}, EpsilonSchedule{schedule.a, schedule.b, l});
    config.opponent = AgentSpec::random();
    config.learning_matches = l;
    config.repetitions = repetitions;
    config.seed = seed;
    config.window = window;
    config.keep_tables = false;
    out.results.push_back(run_experiment(config, execution));
    out.final_win_rates.push_back(out.results.back().mean_convergence);
  }
  return out;
}

}  // namespace qmgg
