#include "qmgg/agents.hpp"

#include "qmgg/reporting.hpp"

namespace qmgg {

AgentSpec AgentSpec::qplayer(LearningParams params, EpsilonSchedule schedule) {
  return {AgentKind::kQPlayer, params, schedule, std::nullopt, std::nullopt};
}

AgentSpec AgentSpec::qmplayer(LearningParams params, EpsilonSchedule schedule,
                              SearchBudget budget) {
  return {AgentKind::kQMPlayer, params, schedule, budget, std::nullopt};
}

AgentSpec AgentSpec::mcs(SearchBudget budget) {
  return {AgentKind::kMcs, std::nullopt, std::nullopt, budget, std::nullopt};
}

AgentSpec AgentSpec::mcts(SearchBudget budget) {
  return {AgentKind::kMcts, std::nullopt, std::nullopt, budget, std::nullopt};
}

std::string_view kind_token(AgentKind kind) {
  switch (kind) {
    case AgentKind::kRandom: return "random";
    case AgentKind::kQPlayer: return "qplayer";
    case AgentKind::kQMPlayer: return "qmplayer";
    case AgentKind::kMcs: return "mcs";
    case AgentKind::kMcts: return "mcts";
  }
  return "unknown";
}

std::string AgentSpec::label() const {
  switch (kind) {
    case AgentKind::kRandom: return "Random";
    case AgentKind::kQPlayer: return "QPlayer";
    case AgentKind::kQMPlayer: return "QMPlayer";
    case AgentKind::kMcs: return "MCS";
    case AgentKind::kMcts: return "MCTS";
  }
  return "Unknown";
}

std::string AgentSpec::token() const {
  std::string out(kind_token(kind));
  if (budget) out += ':' + budget->token();
  if (snapshot) out += '@' + *snapshot;
  return out;
}

void AgentSpec::validate() const {
  const std::string name(kind_token(kind));
  if (is_learner() != params.has_value() || is_learner() != schedule.has_value()) {
    throw ConfigError(name + ": learning parameters are required exactly for learners");
  }
  if (needs_budget() != budget.has_value()) {
    throw ConfigError(name + ": a search budget is required exactly for qmplayer, mcs and mcts");
  }
  if (snapshot && !is_learner()) throw ConfigError(name + " takes no Q-table snapshot");
  if (params) params->validate();
  if (schedule && (schedule->a < 0.0 || schedule->b < 0.0 || schedule->a + schedule->b > 1.0)) {
    throw ConfigError(name + ": epsilon schedule needs a, b >= 0 and a + b <= 1");
  }
}

AgentSpec parse_agent_spec(std::string_view token, std::int64_t learning_matches) {
  std::optional<std::string> snapshot;
  if (const auto at = token.find('@'); at != std::string_view::npos) {
    snapshot = std::string(token.substr(at + 1));
    token = token.substr(0, at);
    if (snapshot->empty()) throw ConfigError("empty snapshot path in agent token");
  }
  const auto colon = token.find(':');
  const auto kind = token.substr(0, colon);
  std::optional<SearchBudget> budget;
  if (colon != std::string_view::npos) budget = parse_budget(token.substr(colon + 1));

  const LearningParams params{};
  const auto schedule = EpsilonSchedule::cosine(0.5, 0.0, learning_matches);
  AgentSpec spec;
  if (kind == "random") {
    spec = AgentSpec::random();
  } else if (kind == "qplayer") {
    spec = AgentSpec::qplayer(params, schedule);
  } else if (kind == "qmplayer") {
    spec = AgentSpec::qmplayer(params, schedule,
                               budget.value_or(SearchBudget::playouts(kDefaultQmBudget)));
  } else if (kind == "mcs") {
    spec = AgentSpec::mcs(budget.value_or(SearchBudget::playouts(kDefaultMcsBudget)));
  } else if (kind == "mcts") {
    spec = AgentSpec::mcts(budget.value_or(SearchBudget::playouts(kDefaultMctsBudget)));
  } else {
    throw ConfigError("unknown agent kind '" + std::string(kind) + "'");
  }
  if (budget && !spec.needs_budget()) {
    throw ConfigError(std::string(kind) + " takes no search budget");
  }
  spec.snapshot = std::move(snapshot);
  spec.validate();
  return spec;
}

Move RandomAgent::select(const GameState& state, const MatchContext&, RandomStream& rng) const {
  const auto moves = state.legal_moves();
  if (moves.empty()) throw ContractViolation("random agent asked to move in " + state.key());
  return moves[rng.below(moves.size())];
}

Move McsAgent::select(const GameState& state, const MatchContext&, RandomStream& rng) const {
  return mcs_select(state, *spec().budget, rng);
}

Move MctsAgent::select(const GameState& state, const MatchContext&, RandomStream& rng) const {
  return mcts_select(state, *spec().budget, rng, state.to_move());
}

QLearningAgent::QLearningAgent(AgentSpec spec)
    : QLearningAgent(std::move(spec), make_role_tables()) {}

QLearningAgent::QLearningAgent(AgentSpec spec, RoleTables tables)
    : Agent(std::move(spec)), tables_(std::move(tables)) {
  if (!this->spec().is_learner()) throw ConfigError("QLearningAgent needs a qplayer/qmplayer spec");
  this->spec().validate();
}

double QLearningAgent::exploration_rate(const MatchContext& context) const {
  return context.learning ? epsilon(*spec().schedule, context.match_index) : 0.0;
}

Move QLearningAgent::select(const GameState& state, const MatchContext& context,
                            RandomStream& rng) const {
  const double eps = exploration_rate(context);
  if (spec().kind == AgentKind::kQMPlayer) {
    return qmplayer_select_eps(tables_, state, eps, *spec().budget, rng);
  }
  return qplayer_select_eps(tables_, state, eps, rng);
}

void QLearningAgent::learn(Role role, const MatchRecord& record) {
  q_backward_update(tables_[index_of(role)], record, *spec().params);
  ++updates_;
}

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const GameSpec& game) {
  spec.validate();
  switch (spec.kind) {
    case AgentKind::kRandom: return std::make_unique<RandomAgent>();
    case AgentKind::kMcs: return std::make_unique<McsAgent>(*spec.budget);
    case AgentKind::kMcts: return std::make_unique<MctsAgent>(*spec.budget);
    case AgentKind::kQPlayer:
    case AgentKind::kQMPlayer:
      if (spec.snapshot) {
        return std::make_unique<QLearningAgent>(spec, load_role_tables(*spec.snapshot, game));
      }
      return std::make_unique<QLearningAgent>(spec);
  }
  throw ConfigError("unknown agent kind");
}

}  // namespace qmgg
