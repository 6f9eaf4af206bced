#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pixelbench/engine/game.hpp"

namespace pixelbench::games {

inline constexpr std::int64_t kFlappyBirdX = 100;
inline constexpr std::int64_t kFlappyBirdSize = 24;
// Top of the ground band; the playfield is [0, kFlappyGroundY).
inline constexpr std::int64_t kFlappyGroundY = 464;
inline constexpr std::int64_t kFlapVelocity = -8;
inline constexpr std::int64_t kFlappyGravity = 1;

struct Pipe {
  std::int64_t x = 0;  // left edge, screen px
  std::int64_t gap_center_y = 0;
  std::int64_t gap_height = 0;
  bool passed = false;
};

struct FlappyState {
  std::int64_t bird_y = 0;  // top edge
  std::int64_t bird_vy = 0;
  std::vector<Pipe> pipes;
  std::int64_t pipes_passed = 0;
  std::int64_t forward_speed = 0;
};

struct FlappyRules {
  std::int64_t gap_px = 160;
  std::int64_t forward_speed_px = 24;
  std::int64_t pipe_spacing_px = 120;
  std::int64_t pipe_width_px = 52;
  std::int64_t first_pipe_x = 260;
  std::int64_t max_gap_shift_px = 32;
  std::int64_t score_cap = 10;
};

FlappyRules flappy_rules(const LevelSpec& level);

class FlappyGame final : public Game {
 public:
  FlappyGame(const LevelSpec& level, SessionSeed seed);
  FlappyGame(const LevelSpec& level, FlappyState state);

  GameId id() const override { return GameId::flappybird; }
  std::span<const Action> alphabet() const override;
  Transition advance(Action action) override;
  void draw(Canvas& canvas) const override;
  std::unique_ptr<Game> clone() const override { return std::make_unique<FlappyGame>(*this); }

  const FlappyState& state() const { return state_; }
  const FlappyRules& rules() const { return rules_; }
  // First pipe whose right edge has not yet cleared the bird; nullptr if none.
  const Pipe* next_pipe() const;

 private:
  FlappyRules rules_;
  FlappyState state_;
};

inline constexpr std::array<Action, 2> kFlappyAlphabet{Action::FLAP, Action::NONE};

}  // namespace pixelbench::games
