#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pixelbench/engine/level.hpp"
#include "pixelbench/harness/trajectory.hpp"

namespace pixelbench::harness {

struct HumanBaseline {
  std::string game;
  std::string level;
  std::vector<std::string> participants;
  std::vector<double> scores;
  double mean = 0.0;
};

// Throws StateError when `scores` is empty.
HumanBaseline make_baseline(const LevelSpec& level, std::vector<std::string> participants, std::vector<double> scores);

// Uses each participant's most recent completed human episode on `level`.
// Aborted episodes never count. Throws StateError when fewer than
// `participants` (>= 1) distinct participants have finished the level.
HumanBaseline collect_human_baseline(const std::vector<EpisodeRecord>& episodes, const LevelSpec& level,
                                     int participants);

nlohmann::json baseline_to_json(const HumanBaseline& b);
HumanBaseline baseline_from_json(const nlohmann::json& j);

// baselines.json maps level keys to baselines; writing replaces one entry.
void store_baseline(const std::filesystem::path& path, const HumanBaseline& b);
std::vector<HumanBaseline> load_baselines(const std::filesystem::path& path);

}  // namespace pixelbench::harness
