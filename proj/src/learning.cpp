#include "qmgg/learning.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <tuple>

namespace qmgg {

namespace {

double parse_unit(std::string_view text, std::string_view context) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("invalid number '" + std::string(text) + "' in '" + std::string(context) +
                      "'");
  }
  return value;
}

}  // namespace

void LearningParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
}

double EpsilonSchedule::operator()(std::int64_t m) const {
  if (m > l) return 0.0;
  if (l <= 0) return a + b;
  const double phase = static_cast<double>(m) * std::numbers::pi / (2.0 * static_cast<double>(l));
  return a * std::cos(phase) + b;
}

double epsilon(const EpsilonSchedule& schedule, std::int64_t m) { return schedule(m); }

void EpsilonSchedule::validate() const {
  if (a < 0.0 || b < 0.0 || a + b > 1.0) {
    throw ConfigError("epsilon schedule needs a, b >= 0 and a + b <= 1");
  }
  if (l <= 0) throw ConfigError("epsilon schedule needs a positive learning length");
}

std::string EpsilonSchedule::token() const {
  auto fmt = [](double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  if (a == 0.0) return "fixed:" + fmt(b);
  return "cosine:" + fmt(a) + ":" + fmt(b);
}

EpsilonSchedule parse_epsilon(std::string_view text, std::int64_t l) {
  const auto first = text.find(':');
  const auto kind = text.substr(0, first);
  EpsilonSchedule schedule;
  if (kind == "fixed" && first != std::string_view::npos) {
    schedule = EpsilonSchedule::fixed(parse_unit(text.substr(first + 1), text), l);
  } else if (kind == "cosine" && first != std::string_view::npos) {
    const auto rest = text.substr(first + 1);
    const auto second = rest.find(':');
    if (second == std::string_view::npos) {
      throw ConfigError("cosine schedule needs 'cosine:a:b', got '" + std::string(text) + "'");
    }
    schedule = EpsilonSchedule::cosine(parse_unit(rest.substr(0, second), text),
                                       parse_unit(rest.substr(second + 1), text), l);
  } else {
    throw ConfigError("unknown epsilon schedule '" + std::string(text) + "'");
  }
  // l == 0 is allowed here: it means "no learning phase".
  if (schedule.a < 0.0 || schedule.b < 0.0 || schedule.a + schedule.b > 1.0) {
    throw ConfigError("epsilon schedule needs a, b >= 0 and a + b <= 1");
  }
  return schedule;
}

std::optional<double> QTable::get(const std::string& key, Move move) const {
  const Row* r = row(key);
  if (!r) return std::nullopt;
  auto it = std::lower_bound(r->begin(), r->end(), move,
                             [](const auto& entry, Move m) { return entry.first < m; });
  if (it == r->end() || it->first != move) return std::nullopt;
  return it->second;
}

void QTable::set(const std::string& key, Move move, double value) {
  Row& r = rows_[key];
  auto it = std::lower_bound(r.begin(), r.end(), move,
                             [](const auto& entry, Move m) { return entry.first < m; });
  if (it != r.end() && it->first == move) {
    it->second = value;
    return;
  }
  r.insert(it, {move, value});
  ++entries_;
}

const QTable::Row* QTable::row(const std::string& key) const {
  auto it = rows_.find(key);
  return it == rows_.end() ? nullptr : &it->second;
}

double QTable::max_value(const std::string& key) const {
  const Row* r = row(key);
  if (!r || r->empty()) return 0.0;
  double best = r->front().second;
  for (const auto& [move, value] : *r) best = std::max(best, value);
  return best;
}

std::vector<QTable::Entry> QTable::sorted_entries() const {
  std::vector<Entry> out;
  out.reserve(entries_);
  for (const auto& [key, r] : rows_) {
    for (const auto& [move, value] : r) out.push_back({key, move, value});
  }
  std::sort(out.begin(), out.end(), [](const Entry& x, const Entry& y) {
    return std::tie(x.key, x.move) < std::tie(y.key, y.move);
  });
  return out;
}

bool operator==(const QTable& lhs, const QTable& rhs) {
  return lhs.role_ == rhs.role_ && lhs.entries_ == rhs.entries_ && lhs.rows_ == rhs.rows_;
}

double reward(const MatchRecord& record, const Decision& decision) {
  return decision.next_key == record.terminal_key ? static_cast<double>(record.terminal_goal)
                                                  : 0.0;
}

std::optional<std::pair<Move, double>> q_lookup_max(const QTable& table,
                                                    const std::string& state_key,
                                                    std::span<const Move> moves) {
  const QTable::Row* r = table.row(state_key);
  if (!r) return std::nullopt;
  std::optional<std::pair<Move, double>> best;
  double expected_score = 0.0;
  for (const auto& [move, value] : *r) {
    if (value <= expected_score) continue;
    if (std::find(moves.begin(), moves.end(), move) == moves.end()) continue;
    expected_score = value;
    best = {move, value};
  }
  return best;
}

void q_backward_update(QTable& table, const MatchRecord& record, const LearningParams& params) {
  for (auto it = record.decisions.rbegin(); it != record.decisions.rend(); ++it) {
    const double old_value = table.get_or_zero(it->state_key, it->move);
    const double target = reward(record, *it) + params.gamma * table.max_value(it->next_key);
    table.set(it->state_key, it->move, (1.0 - params.alpha) * old_value + params.alpha * target);
  }
}

Move qplayer_select_eps(const RoleTables& tables, const GameState& state, double eps,
                        RandomStream& rng) {
  return epsilon_greedy_select(
      tables, state, eps, rng,
      [](const GameState&, std::span<const Move> moves, RandomStream& r) {
        return moves[r.below(moves.size())];
      });
}

Move qmplayer_select_eps(const RoleTables& tables, const GameState& state, double eps,
                         const SearchBudget& budget, RandomStream& rng) {
  return epsilon_greedy_select(tables, state, eps, rng,
                               [&budget](const GameState& s, std::span<const Move>,
                                         RandomStream& r) { return mcs_select(s, budget, r); });
}

Move qplayer_select(const RoleTables& tables, const GameState& state,
                    const EpsilonSchedule& schedule, std::int64_t m, RandomStream& rng) {
  return qplayer_select_eps(tables, state, epsilon(schedule, m), rng);
}

Move qmplayer_select(const RoleTables& tables, const GameState& state,
                     const EpsilonSchedule& schedule, std::int64_t m, const SearchBudget& budget,
                     RandomStream& rng) {
  return qmplayer_select_eps(tables, state, epsilon(schedule, m), budget, rng);
}

ChainPuzzle::ChainPuzzle(int width, std::vector<int> path) : width_(width), path_(std::move(path)) {
  if (width_ < 1 || path_.empty()) throw ConfigError("chain puzzle needs width >= 1 and length >= 1");
  for (int p : path_) {
    if (p < 0 || p >= width_) throw ConfigError("chain puzzle path entry out of range");
  }
}

std::vector<Move> ChainPuzzle::legal_moves(const State& s) const {
  std::vector<Move> out;
  if (is_terminal(s)) return out;
  for (int i = 0; i < width_; ++i) out.push_back(Move{i});
  return out;
}

ChainPuzzle::State ChainPuzzle::step(const State& s, Move m, RandomStream&) const {
  if (is_terminal(s) || m.index < 0 || m.index >= width_) {
    throw ContractViolation("illegal chain puzzle move " + std::to_string(m.index));
  }
  if (m.index != correct_move(s.step)) return {s.step, true};
  return {s.step + 1, false};
}

std::string ChainPuzzle::key(const State& s) const {
  return "chain|" + std::to_string(s.step) + (s.failed ? "|dead" : "|alive");
}

GameState VersusRandomOpponent::step(const State& s, Move m, RandomStream& rng) const {
  GameState next = s.apply(m);
  if (!next.is_terminal()) {
    const auto replies = next.legal_moves();
    next.play(replies[rng.below(replies.size())]);
  }
  return next;
}

}  // namespace qmgg
