#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>

#include "pixelbench/engine/game.hpp"

namespace pixelbench::games {

// Court in world px, drawn below the HUD band. The paddle guards the left
// edge; the right edge is a reflecting wall.
inline constexpr std::int64_t kCourtWidth = 512;
inline constexpr std::int64_t kCourtHeight = 480;
inline constexpr std::int64_t kPaddleX = 16;
inline constexpr std::int64_t kPaddleThickness = 12;
inline constexpr std::int64_t kPaddleFace = kPaddleX + kPaddleThickness;
inline constexpr std::int64_t kBallSize = 12;

struct PongState {
  std::int64_t paddle_y = 0;  // top edge
  std::int64_t paddle_height = 0;
  Point ball;  // top-left
  Point ball_velocity;
  std::int64_t returns = 0;
};

struct PongRules {
  std::int64_t paddle_height_px = 120;
  std::int64_t paddle_stride_px = 32;
  std::int64_t ball_speed_x = 80;
  std::int64_t ball_speed_y_max = 32;
  std::int64_t score_cap = 10;
};

PongRules pong_rules(const LevelSpec& level);

// Reflects a coordinate into [0, kCourtHeight - kBallSize]; the bool is true
// when an odd number of wall bounces occurred.
std::pair<std::int64_t, bool> fold_ball_y(std::int64_t y);

class PongGame final : public Game {
 public:
  PongGame(const LevelSpec& level, SessionSeed seed);
  PongGame(const LevelSpec& level, PongState state);

  GameId id() const override { return GameId::pong; }
  std::span<const Action> alphabet() const override;
  Transition advance(Action action) override;
  void draw(Canvas& canvas) const override;
  std::unique_ptr<Game> clone() const override { return std::make_unique<PongGame>(*this); }

  const PongState& state() const { return state_; }
  const PongRules& rules() const { return rules_; }

  // Ball top y where it will next cross the paddle face, following wall
  // reflections; ignores the paddle itself.
  std::int64_t predict_intercept_y() const;

 private:
  PongRules rules_;
  PongState state_;
};

inline constexpr std::array<Action, 3> kPongAlphabet{Action::UP, Action::DOWN, Action::NONE};

}  // namespace pixelbench::games
