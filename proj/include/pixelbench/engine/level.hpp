#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pixelbench/engine/types.hpp"

namespace pixelbench {

// Static per-level geometry. Race obstacles and platformer terrain are both
// `solids`; platformer enemies and spikes are `hazards`.
struct LevelGeometry {
  std::vector<Rect> solids;
  std::vector<Rect> hazards;
  std::optional<std::int64_t> goal_x;
  // Scripted platformer tape shipped with the level (may be empty).
  std::vector<Action> oracle_tape;
};

struct LevelSpec {
  // Registry key, unique across all games, e.g. "race-1-nohistory".
  std::string key;
  // Display name as in the level tables, e.g. "Level1 No History".
  std::string name;
  GameId game = GameId::race;
  int level_index = 1;
  Perspective perspective = Perspective::map_view;
  std::map<std::string, std::int64_t> params;
  LevelGeometry geometry;
  int max_steps = 1;
  int history_frames = 3;
  double human_max_score = 1.0;

  // Throws ConfigError when the key is absent.
  std::int64_t param(const std::string& name) const;
};

struct SessionSeed {
  std::uint64_t value = 0;
};

}  // namespace pixelbench
