// Experiment configuration files: INI-style key/value text.
//
//   game = tictactoe:3x3:3
//   learning_matches = 50000
//   repetitions = 5
//   seed = 1
//   window = 500
//
//   [learner]
//   kind = qplayer          ; random | qplayer | qmplayer | mcs | mcts
//   alpha = 0.1
//   gamma = 0.9
//   epsilon = cosine:0.5:0  ; or fixed:0.1
//   budget = playouts:200   ; qmplayer / mcs / mcts only
//   snapshot = runs/q/rep0  ; optional
//
//   [opponent]
//   kind = random

#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "qmgg/harness.hpp"

namespace qmgg {

ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

nlohmann::json to_json(const AgentSpec& spec);
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace qmgg
