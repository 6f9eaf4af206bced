#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "pixelbench/engine/game.hpp"
#include "pixelbench/games/tempest.hpp"

namespace pixelbench::models {

// Per-game perfect-information controllers. They read the simulation state
// directly instead of the frame, so they prove that a level is solvable but
// are never ranked next to frame-only backends unless explicitly admitted.

// Next map-view move along a shortest stride-grid path to the trophy.
Action race_map_oracle(const GameSession& session);
// FLAP when the bird would otherwise sink below the next gap's center.
Action flappy_oracle(const GameSession& session);
// Moves the paddle toward where the ball will next cross the paddle face.
Action pong_oracle(const GameSession& session);

struct BeamOptions {
  std::size_t width = 256;
};

// Generic beam search over cloned game states. `heuristic` ranks
// unfinished states (higher is better) and `key` deduplicates them. Returns
// the action sequence of the best finished episode found, by final score and
// then by fewer steps.
std::vector<Action> beam_plan(const Game& start, std::int64_t steps_taken, std::int64_t max_steps,
                              const std::function<std::int64_t(const Game&)>& heuristic,
                              const std::function<std::uint64_t(const Game&)>& key, BeamOptions options);

std::vector<Action> plan_race_first_person(const GameSession& session, BeamOptions options = {});
std::vector<Action> plan_mario(const GameSession& session, BeamOptions options = {});

// Exhaustive search over (distance, lane, mode) for a tempest track. Returns
// a surviving action sequence to the end of the track, or nullopt when every
// sequence dies.
std::optional<std::vector<Action>> plan_tempest(const games::TempestState& state, const games::TempestRules& rules);

// Stateful oracle for one episode: rule-based games answer per step, planned
// games compute a plan on first use (or after unexpected divergence) and
// follow it. Mario prefers the level's shipped tape when it has one.
class Oracle {
 public:
  Action decide(const GameSession& session);

 private:
  std::vector<Action> plan_;
  std::size_t cursor_ = 0;
  std::int64_t plan_origin_ = -1;
};

}  // namespace pixelbench::models
