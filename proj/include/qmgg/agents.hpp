#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "qmgg/game.hpp"
#include "qmgg/learning.hpp"
#include "qmgg/random.hpp"
#include "qmgg/search.hpp"

namespace qmgg {

enum class AgentKind : std::uint8_t { kRandom, kQPlayer, kQMPlayer, kMcs, kMcts };

inline constexpr std::int64_t kDefaultQmBudget = 200;       // stands in for a 50 ms MCS fallback
inline constexpr std::int64_t kDefaultMcsBudget = 10'000;
inline constexpr std::int64_t kDefaultMctsBudget = 100'000;

/// What an agent is. Learning parameters and the schedule are present exactly
/// for the Q kinds; the budget exactly for QMPlayer, MCS and MCTS.
struct AgentSpec {
  AgentKind kind = AgentKind::kRandom;
  std::optional<LearningParams> params;
  std::optional<EpsilonSchedule> schedule;
  std::optional<SearchBudget> budget;
  std::optional<std::string> snapshot;  // Q-table path prefix for frozen learners

  static AgentSpec random() { return {}; }
  static AgentSpec qplayer(LearningParams params, EpsilonSchedule schedule);
  static AgentSpec qmplayer(LearningParams params, EpsilonSchedule schedule, SearchBudget budget);
  static AgentSpec mcs(SearchBudget budget);
  static AgentSpec mcts(SearchBudget budget);

  bool is_learner() const { return kind == AgentKind::kQPlayer || kind == AgentKind::kQMPlayer; }
  bool needs_budget() const { return kind == AgentKind::kQMPlayer || kind == AgentKind::kMcs || kind == AgentKind::kMcts; }

  /// Table-style display name: Random, QPlayer, QMPlayer, MCS, MCTS.
  std::string label() const;
  /// Round-trippable text form, see parse_agent_spec().
  std::string token() const;
  void validate() const;
};

std::string_view kind_token(AgentKind kind);

/// Parses `kind[:budget][@snapshot]`, e.g. `random`, `mcts:playouts:100000`,
/// `qmplayer:playouts:200@runs/q/rep0`. Missing parts take the defaults
/// alpha 0.1, gamma 0.9, eps cosine a=0.5 b=0 over `learning_matches`, and the
/// kind's default playout budget.
AgentSpec parse_agent_spec(std::string_view token, std::int64_t learning_matches = 0);

struct MatchContext {
  std::int64_t match_index = 0;
  bool learning = false;
};

class Agent {
 public:
  virtual ~Agent() = default;

  const AgentSpec& spec() const { return spec_; }

  /// Must not mutate the agent: frozen agents are shared across threads.
  virtual Move select(const GameState& state, const MatchContext& context,
                      RandomStream& rng) const = 0;

  virtual bool learns() const { return false; }
  /// Applies the end-of-match update for `role`.
  virtual void learn(Role, const MatchRecord&) {}

 protected:
  explicit Agent(AgentSpec spec) : spec_(std::move(spec)) {}

 private:
  AgentSpec spec_;
};

class RandomAgent final : public Agent {
 public:
  RandomAgent() : Agent(AgentSpec::random()) {}
  Move select(const GameState& state, const MatchContext&, RandomStream& rng) const override;
};

class McsAgent final : public Agent {
 public:
  explicit McsAgent(SearchBudget budget) : Agent(AgentSpec::mcs(budget)) {}
  Move select(const GameState& state, const MatchContext&, RandomStream& rng) const override;
};

class MctsAgent final : public Agent {
 public:
  explicit MctsAgent(SearchBudget budget) : Agent(AgentSpec::mcts(budget)) {}
  Move select(const GameState& state, const MatchContext&, RandomStream& rng) const override;
};

/// QPlayer or QMPlayer, holding one table per role. Exploration follows the
/// schedule during learning matches and is zero otherwise.
class QLearningAgent final : public Agent {
 public:
  explicit QLearningAgent(AgentSpec spec);
  QLearningAgent(AgentSpec spec, RoleTables tables);

  Move select(const GameState& state, const MatchContext& context,
              RandomStream& rng) const override;
  bool learns() const override { return true; }
  void learn(Role role, const MatchRecord& record) override;

  double exploration_rate(const MatchContext& context) const;
  const RoleTables& tables() const { return tables_; }
  RoleTables& tables() { return tables_; }
  std::int64_t updates() const { return updates_; }

 private:
  RoleTables tables_;
  std::int64_t updates_ = 0;
};

/// Builds the agent; learners with a snapshot load `<snapshot>.role{0,1}.qtable`.
std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const GameSpec& game);

}  // namespace qmgg
