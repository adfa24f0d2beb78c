// qmgg: command-line front end for the learners, searchers and experiments.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "qmgg/config.hpp"
#include "qmgg/harness.hpp"
#include "qmgg/oracle.hpp"
#include "qmgg/reporting.hpp"

namespace fs = std::filesystem;
using namespace qmgg;

namespace {

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, sep);) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Execution configure_jobs(int jobs) {
  if (jobs < 1) throw ConfigError("--jobs must be at least 1");
  omp_set_num_threads(jobs);
  return jobs > 1 ? Execution::kParallel : Execution::kSerial;
}

std::string render(const GameState& state) {
  const auto& spec = state.spec();
  std::ostringstream out;
  const bool bottom_up = spec.kind == GameKind::kConnectFour;
  for (int i = 0; i < spec.height; ++i) {
    const int row = bottom_up ? spec.height - 1 - i : i;
    if (spec.kind == GameKind::kHex) out << std::string(static_cast<std::size_t>(row), ' ');
    for (int col = 0; col < spec.width; ++col) {
      const Cell c = state.at(row, col);
      out << (c == Cell::kEmpty ? '.' : c == Cell::kP0 ? 'x' : 'o') << ' ';
    }
    out << '\n';
  }
  return out.str();
}

std::string fmt_rate(double r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << r;
  return out.str();
}

struct LearnOptions {
  std::string game;
  std::string agent = "qplayer";
  std::string opponent = "random";
  std::int64_t learning_matches = 50000;
  int reps = 5;
  std::uint64_t seed = 1;
  std::string out;
  int window = 500;
  double alpha = 0.1;
  double gamma = 0.9;
  std::string epsilon = "cosine:0.5:0";
  std::string budget = "playouts:200";
  std::int64_t baseline_matches = 10000;
  std::string config;
  std::string compare_epsilon;
  int jobs = 1;
};

ExperimentConfig config_from_flags(const LearnOptions& o) {
  if (!o.config.empty()) return load_experiment_config(o.config);
  ExperimentConfig config;
  config.game = parse_game_spec(o.game);
  config.learning_matches = o.learning_matches;
  config.learner = parse_agent_spec(o.agent, o.learning_matches);
  if (!config.learner.is_learner()) throw ConfigError("--agent must be qplayer or qmplayer");
  config.learner.params = LearningParams{o.alpha, o.gamma};
  config.learner.schedule = parse_epsilon(o.epsilon, o.learning_matches);
  if (config.learner.kind == AgentKind::kQMPlayer && o.agent.find(':') == std::string::npos) {
    config.learner.budget = parse_budget(o.budget);
  }
  config.opponent = parse_agent_spec(o.opponent, o.learning_matches);
  config.repetitions = o.reps;
  config.seed = o.seed;
  config.window = o.window;
  config.baseline_matches = o.baseline_matches;
  config.validate();
  return config;
}

std::vector<std::string> calibration_notes(const ExperimentConfig& config) {
  std::vector<std::string> notes;
  notes.push_back("win rate = wins / matches; draws count as non-wins");
  notes.push_back("window = " + std::to_string(config.window) + " matches");
  if (config.learner.kind == AgentKind::kQMPlayer) {
    notes.push_back("QMPlayer fallback budget " + config.learner.budget->token() +
                    " stands in for a 50 ms Monte Carlo Search time limit");
  }
  if (config.learning_matches == 0) {
    notes.push_back("no learning phase; " + std::to_string(config.baseline_matches) +
                    " untrained evaluation matches");
  }
  return notes;
}

void write_experiment(const ExperimentResult& result, const fs::path& dir, double seconds) {
  const auto& config = result.config;
  fs::create_directories(dir);
  for (std::size_t r = 0; r < result.repetitions.size(); ++r) {
    const auto& rep = result.repetitions[r];
    if (!rep.series.points().empty()) {
      write_series(rep.series, dir / ("series_rep" + std::to_string(r) + ".csv"));
    }
    if (rep.tables) {
      save_role_tables(*rep.tables, config.game, *config.learner.params, config.learning_matches,
                       dir / ("qtable_rep" + std::to_string(r)));
    }
  }
  if (!result.aggregate.empty()) write_aggregate(result, dir / "aggregate.csv");
  RunMetadata meta;
  meta.config = to_json(config);
  meta.config["convergence_win_rate"] = result.mean_convergence;
  meta.config["convergence_variance"] = result.convergence_variance;
  meta.seed = config.seed;
  meta.version = version_string();
  meta.wall_seconds = seconds;
  meta.notes = calibration_notes(config);
  write_metadata(meta, dir / "metadata.json");
}

int run_learn(const LearnOptions& o) {
  const Execution execution = configure_jobs(o.jobs);
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig config = config_from_flags(o);
  const fs::path out_dir(o.out);

  if (!o.compare_epsilon.empty()) {
    std::vector<EpsilonSchedule> variants;
    for (const auto& token : split_list(o.compare_epsilon)) {
      variants.push_back(parse_epsilon(token, config.learning_matches));
    }
    const auto cmp = epsilon_comparison_experiment(config.game, variants, config.learning_matches,
                                                   config.repetitions, config.seed, config.window,
                                                   execution);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (std::size_t i = 0; i < variants.size(); ++i) {
      write_experiment(cmp.results[i], out_dir / ("epsilon_" + std::to_string(i)), seconds);
      std::cout << variants[i].token() << "  final win rate " << fmt_rate(cmp.final_win_rates[i]);
      if (i > 0) std::cout << "  (first variant leads by " << fmt_rate(cmp.final_win_rates[0] - cmp.final_win_rates[i]) << ")";
      std::cout << '\n';
    }
    return 0;
  }

  if (config.learning_matches == 0) {
    std::cerr << "warning: --learning-matches 0, the learner plays untrained\n";
  }
  const auto result = run_experiment(config, execution);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_experiment(result, out_dir, seconds);

  Tally total;
  for (const auto& rep : result.repetitions) {
    total.wins += rep.exploitation.wins;
    total.draws += rep.exploitation.draws;
    total.losses += rep.exploitation.losses;
  }
  std::cout << config.learner.label() << " vs " << config.opponent.label() << " on "
            << config.game.token() << ", l=" << config.learning_matches << ", "
            << config.repetitions << " repetitions\n";
  std::cout << "convergence win rate: " << fmt_rate(result.mean_convergence)
            << " (variance " << result.convergence_variance << ")\n";
  std::cout << "exploitation W/D/L: " << total.wins << '/' << total.draws << '/' << total.losses
            << ", decisive win rate " << fmt_rate(total.decisive_win_rate()) << '\n';
  std::cout << "outputs written to " << out_dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Q-learning, QM-learning, MCS and MCTS for small board games"};
  app.require_subcommand(1, 1);

  LearnOptions learn;
  auto* learn_cmd = app.add_subcommand("learn", "Run a learning experiment against an opponent");
  learn_cmd->add_option("--game", learn.game, "Game token, e.g. tictactoe:3x3:3, connectfour:4x4:4, hex:3x3");
  learn_cmd->add_option("--agent", learn.agent, "Learner: qplayer or qmplayer[:budget]")->capture_default_str();
  learn_cmd->add_option("--opponent", learn.opponent, "Opponent agent token")->capture_default_str();
  learn_cmd->add_option("--learning-matches", learn.learning_matches, "Learning matches l (1.5 l matches in total)")->capture_default_str();
  learn_cmd->add_option("--reps", learn.reps, "Independent repetitions")->capture_default_str();
  learn_cmd->add_option("--seed", learn.seed, "Root random seed")->capture_default_str();
  learn_cmd->add_option("--out", learn.out, "Output directory")->required();
  learn_cmd->add_option("--window", learn.window, "Win-rate window in matches")->capture_default_str();
  learn_cmd->add_option("--alpha", learn.alpha, "Learning rate")->capture_default_str();
  learn_cmd->add_option("--gamma", learn.gamma, "Discount factor")->capture_default_str();
  learn_cmd->add_option("--epsilon", learn.epsilon, "Exploration schedule: cosine:a:b or fixed:e")->capture_default_str();
  learn_cmd->add_option("--budget", learn.budget, "QMPlayer fallback search budget")->capture_default_str();
  learn_cmd->add_option("--baseline-matches", learn.baseline_matches, "Evaluation matches when l = 0")->capture_default_str();
  learn_cmd->add_option("--config", learn.config, "Experiment config file (replaces the flags above)");
  learn_cmd->add_option("--compare-epsilon", learn.compare_epsilon, "Comma-separated schedules to compare, e.g. cosine:0.5:0,fixed:0.1,fixed:0.2");
  learn_cmd->add_option("--jobs", learn.jobs, "Worker threads")->capture_default_str();

  std::string game;
  std::string agent_a = "random";
  std::string agent_b = "random";
  std::string agent_list;
  std::int64_t matches = 100;
  std::uint64_t seed = 1;
  std::string out;
  int jobs = 1;

  auto* compete_cmd = app.add_subcommand("compete", "Head-to-head matches between two frozen agents");
  compete_cmd->add_option("--game", game, "Game token")->required();
  compete_cmd->add_option("--agent", agent_a, "First agent token")->capture_default_str();
  compete_cmd->add_option("--opponent", agent_b, "Second agent token")->capture_default_str();
  compete_cmd->add_option("--matches", matches, "Matches (first mover alternates)")->capture_default_str();
  compete_cmd->add_option("--seed", seed, "Root random seed")->capture_default_str();
  compete_cmd->add_option("--jobs", jobs, "Worker threads")->capture_default_str();

  auto* tournament_cmd = app.add_subcommand("tournament", "Round-robin win-rate matrix");
  tournament_cmd->add_option("--game", game, "Game token")->required();
  tournament_cmd->add_option("--agents", agent_list, "Comma-separated agent tokens, e.g. mcts,random,qplayer@runs/q/qtable_rep0,mcs")->required();
  tournament_cmd->add_option("--matches", matches, "Matches per pair")->capture_default_str();
  tournament_cmd->add_option("--seed", seed, "Root random seed")->capture_default_str();
  tournament_cmd->add_option("--out", out, "Output directory for matrix.csv / matrix.json");
  tournament_cmd->add_option("--jobs", jobs, "Worker threads")->capture_default_str();

  auto* play_cmd = app.add_subcommand("play", "Play and print one match");
  play_cmd->add_option("--game", game, "Game token")->required();
  play_cmd->add_option("--agent", agent_a, "First mover token")->capture_default_str();
  play_cmd->add_option("--opponent", agent_b, "Second mover token")->capture_default_str();
  play_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();

  std::string mode = "minimax";
  std::string moves_text;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive ground truth for small games");
  oracle_cmd->add_option("--game", game, "Game token")->required();
  oracle_cmd->add_option("--mode", mode, "minimax or enumerate")
      ->check(CLI::IsMember({"minimax", "enumerate"}))
      ->capture_default_str();
  oracle_cmd->add_option("--moves", moves_text, "Comma-separated moves leading to the queried position");

  CLI11_PARSE(app, argc, argv);

  try {
    if (learn_cmd->parsed()) {
      if (learn.config.empty() && learn.game.empty()) {
        throw CLI::RequiredError("--game");
      }
      return run_learn(learn);
    }
    if (compete_cmd->parsed()) {
      const Execution execution = configure_jobs(jobs);
      const GameSpec spec = parse_game_spec(game);
      const auto a = parse_agent_spec(agent_a);
      const auto b = parse_agent_spec(agent_b);
      const Tally t = compete(a, b, spec, matches, seed, execution);
      std::cout << a.label() << " vs " << b.label() << " on " << spec.token() << ": W/D/L "
                << t.wins << '/' << t.draws << '/' << t.losses << ", win rate "
                << fmt_rate(t.win_rate()) << '\n';
      return 0;
    }
    if (tournament_cmd->parsed()) {
      const Execution execution = configure_jobs(jobs);
      const GameSpec spec = parse_game_spec(game);
      std::vector<AgentSpec> agents;
      for (const auto& token : split_list(agent_list)) agents.push_back(parse_agent_spec(token));
      if (agents.size() < 2) throw CLI::ValidationError("--agents", "needs at least two agents");
      const auto start = std::chrono::steady_clock::now();
      const auto matrix = run_tournament(agents, spec, matches, seed, execution);
      std::cout << "column agent's win rate against row agent, " << matches
                << " matches per pair\n"
                << matrix_to_csv(matrix);
      if (!out.empty()) {
        const fs::path dir(out);
        write_matrix(matrix, dir / "matrix.csv");
        std::ofstream(dir / "matrix.json") << matrix_to_json(matrix).dump(2) << '\n';
        RunMetadata meta;
        meta.config = {{"game", spec.token()}, {"matches_per_pair", matches}};
        for (const auto& a : agents) meta.config["agents"].push_back(to_json(a));
        meta.seed = seed;
        meta.version = version_string();
        meta.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        meta.notes = {"cell = column agent's wins / matches; draws are reported in matrix.json"};
        write_metadata(meta, dir / "metadata.json");
      }
      return 0;
    }
    if (play_cmd->parsed()) {
      const GameSpec spec = parse_game_spec(game);
      auto a = make_agent(parse_agent_spec(agent_a), spec);
      auto b = make_agent(parse_agent_spec(agent_b), spec);
      RandomStream rng(seed);
      const auto outcome = play_match(*a, *b, spec, rng, 0, false, true);
      GameState state(spec);
      std::cout << render(state) << '\n';
      for (Move m : outcome.result.moves) {
        std::cout << (state.to_move() == Role::kFirst ? a : b)->spec().label() << " plays "
                  << m.index << '\n';
        state.play(m);
        std::cout << render(state) << '\n';
      }
      std::cout << "goals: " << a->spec().label() << ' ' << outcome.result.goals[0] << ", "
                << b->spec().label() << ' ' << outcome.result.goals[1] << '\n';
      return 0;
    }
    if (oracle_cmd->parsed()) {
      const GameSpec spec = parse_game_spec(game);
      if (mode == "enumerate") {
        std::cout << "reachable states: " << count_reachable_states(spec) << '\n';
        return 0;
      }
      GameState state(spec);
      for (const auto& token : split_list(moves_text)) state.play(Move{std::stoi(token)});
      MinimaxOracle oracle(spec);
      const int v = oracle.value(state);
      std::cout << "position: " << state.key() << '\n';
      std::cout << "value: first=" << v << " second=" << kGoalWin - v << " ("
                << (v == kGoalDraw ? "draw" : v == kGoalWin ? "first player wins" : "second player wins")
                << ")\n";
      if (!state.is_terminal()) {
        std::cout << "optimal moves:";
        for (Move m : oracle.optimal_moves(state)) std::cout << ' ' << m.index;
        std::cout << '\n';
      }
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
