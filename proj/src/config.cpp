#include "qmgg/config.hpp"

#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qmgg/reporting.hpp"

namespace qmgg {

namespace pt = boost::property_tree;

namespace {

// ptree's get(key, default) falls back silently on unparsable text; a present
// but malformed value must be an error instead.
template <class T>
T read(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto raw = tree.get_optional<std::string>(key);
  if (!raw) return fallback;
  std::istringstream in(*raw);
  T value{};
  if (!(in >> value) || !(in >> std::ws).eof()) {
    throw ConfigError("experiment config: invalid value '" + *raw + "' for " + key);
  }
  return value;
}

AgentSpec agent_from_section(const pt::ptree& section, std::int64_t l) {
  const auto kind = section.get<std::string>("kind");
  std::string token = kind;
  if (auto budget = section.get_optional<std::string>("budget")) token += ':' + *budget;
  if (auto snapshot = section.get_optional<std::string>("snapshot")) token += '@' + *snapshot;
  AgentSpec spec = parse_agent_spec(token, l);
  if (spec.is_learner()) {
    spec.params->alpha = read(section, "alpha", spec.params->alpha);
    spec.params->gamma = read(section, "gamma", spec.params->gamma);
    if (auto eps = section.get_optional<std::string>("epsilon")) {
      spec.schedule = parse_epsilon(*eps, l);
    }
  }
  spec.validate();
  return spec;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  try {
    ExperimentConfig config;
    config.game = parse_game_spec(tree.get<std::string>("game"));
    config.learning_matches = read(tree, "learning_matches", config.learning_matches);
    config.repetitions = read(tree, "repetitions", config.repetitions);
    config.seed = read(tree, "seed", config.seed);
    config.window = read(tree, "window", config.window);
    config.baseline_matches = read(tree, "baseline_matches", config.baseline_matches);
    config.learner = agent_from_section(tree.get_child("learner"), config.learning_matches);
    if (auto opponent = tree.get_child_optional("opponent")) {
      config.opponent = agent_from_section(*opponent, config.learning_matches);
    } else {
      config.opponent = AgentSpec::random();
    }
    config.validate();
    return config;
  } catch (const pt::ptree_error& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open experiment config " + path.string());
  return parse_experiment_config(in);
}

nlohmann::json to_json(const AgentSpec& spec) {
  nlohmann::json j;
  j["kind"] = std::string(kind_token(spec.kind));
  if (spec.params) {
    j["alpha"] = spec.params->alpha;
    j["gamma"] = spec.params->gamma;
  }
  if (spec.schedule) {
    j["epsilon"] = spec.schedule->token();
    j["epsilon_l"] = spec.schedule->l;
  }
  if (spec.budget) j["budget"] = spec.budget->token();
  if (spec.snapshot) j["snapshot"] = *spec.snapshot;
  return j;
}

nlohmann::json to_json(const ExperimentConfig& config) {
  return {
      {"game", config.game.token()},
      {"learner", to_json(config.learner)},
      {"opponent", to_json(config.opponent)},
      {"learning_matches", config.learning_matches},
      {"exploitation_matches", config.exploitation_matches()},
      {"repetitions", config.repetitions},
      {"seed", config.seed},
      {"window", config.window},
  };
}

}  // namespace qmgg
