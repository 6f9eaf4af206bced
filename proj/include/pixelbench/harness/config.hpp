#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pixelbench/elo/elo.hpp"
#include "pixelbench/engine/level.hpp"
#include "pixelbench/models/backend.hpp"

namespace pixelbench::harness {

inline constexpr int kConfigSchemaVersion = 1;

struct EvaluationConfig {
  std::vector<models::ModelProfile> models;
  // Game names; empty selects every game.
  std::vector<std::string> games;
  // Registry keys; when non-empty they take precedence over `games`.
  std::vector<std::string> levels;
  int rounds = 100;
  std::uint64_t master_seed = 0;
  int max_parallel_pairs = 1;
  int max_remote_requests = 4;
  std::filesystem::path output_dir = "run";
  // Scripted oracles are kept out of ranked pools unless this is set.
  bool admit_oracles = false;
  bool save_frames = true;
  // Used for the report written at the end of `run`.
  elo::StabilizationConfig stabilization;
};

// Throws ConfigError on unknown fields, out-of-range values, duplicate model
// names or an inline API key inside a profile. A relative output_dir is kept
// as written; callers resolve it.
EvaluationConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const EvaluationConfig& cfg);
EvaluationConfig load_config(const std::filesystem::path& path);

// Levels selected by the config, in registry order. Throws ConfigError for
// unknown games or keys, or an empty selection.
std::vector<LevelSpec> selected_levels(const EvaluationConfig& cfg);

// Throws ConfigError unless the config can produce a ranked pool: at least
// two models, rounds >= 1, oracles only when admitted.
void validate_for_ranking(const EvaluationConfig& cfg);

}  // namespace pixelbench::harness
