#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pixelbench/engine/game.hpp"

namespace pixelbench::games {

inline constexpr std::int64_t kMarioWidth = 24;
inline constexpr std::int64_t kMarioHeight = 32;
inline constexpr std::int64_t kMarioStartX = 48;
inline constexpr std::int64_t kMarioGroundY = 448;
inline constexpr std::int64_t kMarioWorldBottom = 512;
// Screen column the camera keeps the player at while scrolling.
inline constexpr std::int64_t kMarioCameraLead = 160;

struct MarioState {
  Point player;  // top-left, world px
  std::int64_t player_vy = 0;
  bool grounded = true;
  std::int64_t progress_x = kMarioStartX;
};

struct MarioRules {
  std::int64_t stride_px = 16;
  std::int64_t jump_velocity = 12;
  std::int64_t gravity = 2;
  std::int64_t max_fall_speed = 16;
  std::int64_t goal_x = 1200;
  std::int64_t completion_score = 800;
};

MarioRules mario_rules(const LevelSpec& level);

class MarioGame final : public Game {
 public:
  MarioGame(const LevelSpec& level, SessionSeed seed);
  MarioGame(const LevelSpec& level, MarioState state);

  GameId id() const override { return GameId::supermario; }
  std::span<const Action> alphabet() const override;
  Transition advance(Action action) override;
  void draw(Canvas& canvas) const override;
  std::unique_ptr<Game> clone() const override { return std::make_unique<MarioGame>(*this); }

  const MarioState& state() const { return state_; }
  const MarioRules& rules() const { return rules_; }
  std::int64_t score() const;
  // Player x at which the flag counts as reached.
  std::int64_t finish_x() const { return rules_.goal_x - kMarioWidth; }

 private:
  Rect player_rect() const { return {state_.player.x, state_.player.y, kMarioWidth, kMarioHeight}; }

  MarioRules rules_;
  std::vector<Rect> solids_;
  std::vector<Rect> hazards_;
  MarioState state_;
};

inline constexpr std::array<Action, 6> kMarioAlphabet{Action::LEFT,      Action::RIGHT,      Action::JUMP,
                                                      Action::JUMP_LEFT, Action::JUMP_RIGHT, Action::NONE};

}  // namespace pixelbench::games
