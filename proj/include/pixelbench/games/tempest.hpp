#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pixelbench/engine/game.hpp"

namespace pixelbench::games {

enum class TrackEntity : std::uint8_t { empty, red_spike, purple_wall, green_enemy };
enum class RunnerMode : std::uint8_t { run, jump, slide };

// Slots a jump or slide covers, counting the slot entered on the same step.
inline constexpr int kManeuverSlots = 2;

struct TempestState {
  int lane = 0;
  RunnerMode mode = RunnerMode::run;
  int mode_remaining = 0;
  std::int64_t distance = 0;
  // track[slot][lane]
  std::vector<std::vector<TrackEntity>> track;
};

struct TempestRules {
  int lane_count = 4;
  std::int64_t spawn_interval_slots = 6;
  std::int64_t view_depth_slots = 12;
  std::int64_t track_length_slots = 200;
  std::int64_t first_barrier_slot = 6;
  std::int64_t score_per_slot = 10;
};

TempestRules tempest_rules(const LevelSpec& level);

// Deterministic barrier schedule: one row every spawn_interval_slots, each
// row leaving at least one lane without a wall.
std::vector<std::vector<TrackEntity>> generate_track(const TempestRules& rules, std::uint64_t seed);

// Pure transition used by the game and by planners: applies `action` to a
// runner state against `track` (which it may modify when an enemy is
// eliminated). Returns the fatal-contact message, if any.
struct RunnerStep {
  bool dead = false;
  std::string info;
};
RunnerStep apply_runner_action(TempestState& state, const TempestRules& rules, Action action);

// Screen point of the tunnel-space coordinate (lateral, vertical, depth).
// Lateral is measured from the tunnel axis, vertical downward from the eye,
// depth ahead of the eye; depth must be positive.
Point project_tunnel_point(std::int64_t lateral, std::int64_t vertical, std::int64_t depth);

inline constexpr std::int64_t kTunnelFocal = 256;
inline constexpr std::int64_t kTunnelHorizonY = 200;
inline constexpr std::int64_t kTunnelCenterX = 256;
inline constexpr std::int64_t kLaneWidth = 100;
inline constexpr std::int64_t kEyeHeight = 120;
inline constexpr std::int64_t kCeilingHeight = 120;  // above the eye
inline constexpr std::int64_t kSlotDepth = 60;
inline constexpr std::int64_t kNearDepth = 200;

class TempestGame final : public Game {
 public:
  TempestGame(const LevelSpec& level, SessionSeed seed);
  TempestGame(const LevelSpec& level, TempestState state);

  GameId id() const override { return GameId::tempestrun; }
  std::span<const Action> alphabet() const override;
  Transition advance(Action action) override;
  void draw(Canvas& canvas) const override;
  std::unique_ptr<Game> clone() const override { return std::make_unique<TempestGame>(*this); }

  const TempestState& state() const { return state_; }
  const TempestRules& rules() const { return rules_; }

 private:
  std::int64_t score() const;

  TempestRules rules_;
  TempestState state_;
};

inline constexpr std::array<Action, 6> kTempestAlphabet{Action::LEFT, Action::RIGHT, Action::JUMP,
                                                        Action::SLIDE, Action::DASH, Action::NONE};

}  // namespace pixelbench::games
