#include "pixelbench/games/pong.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "pixelbench/core/rng.hpp"
#include "pixelbench/games/common.hpp"

namespace pixelbench::games {
namespace {

constexpr std::int64_t kBallMaxY = kCourtHeight - kBallSize;
constexpr std::int64_t kBallMaxX = kCourtWidth - kBallSize;

struct BallStep {
  Point position;
  Point velocity;
  // Set when the ball crossed the paddle face during the step.
  std::optional<std::int64_t> crossing_y;
  std::int64_t overshoot = 0;
};

// Moves the ball one step against the walls only.
BallStep move_ball(Point p, Point v) {
  BallStep out;
  auto [y, flipped] = fold_ball_y(p.y + v.y);
  out.velocity = {v.x, flipped ? -v.y : v.y};
  std::int64_t x = p.x + v.x;
  if (x > kBallMaxX) {
    x = 2 * kBallMaxX - x;
    out.velocity.x = -v.x;
  }
  if (v.x < 0 && x < kPaddleFace && p.x >= kPaddleFace) {
    // Fraction of the step spent reaching the face: (p.x - face) / -v.x.
    out.crossing_y = fold_ball_y(p.y + v.y * (p.x - kPaddleFace) / -v.x).first;
    out.overshoot = kPaddleFace - x;
  }
  out.position = {x, y};
  return out;
}

}  // namespace

std::pair<std::int64_t, bool> fold_ball_y(std::int64_t y) {
  if (y < 0) return {-y, true};
  if (y > kBallMaxY) return {2 * kBallMaxY - y, true};
  return {y, false};
}

PongRules pong_rules(const LevelSpec& level) {
  PongRules r;
  r.paddle_height_px = level.param("paddle_height_px");
  r.paddle_stride_px = level.param("paddle_stride_px");
  r.ball_speed_x = level.param("ball_speed_x");
  r.ball_speed_y_max = level.param("ball_speed_y_max");
  r.score_cap = level.param("score_cap");
  return r;
}

PongGame::PongGame(const LevelSpec& level, SessionSeed seed) : rules_(pong_rules(level)) {
  Rng rng(derive_seed(seed.value, {fnv1a64(level.key)}));
  state_.paddle_height = rules_.paddle_height_px;
  state_.paddle_y = (kCourtHeight - rules_.paddle_height_px) / 2;
  state_.ball = {rng.between(256, 400), rng.between(40, kBallMaxY - 40)};
  std::int64_t vy = rng.between(rules_.ball_speed_y_max / 2, rules_.ball_speed_y_max);
  if (rng.below(2) == 0) vy = -vy;
  // Serve toward the far wall so every seed leaves time to position.
  state_.ball_velocity = {rules_.ball_speed_x, vy};
}

PongGame::PongGame(const LevelSpec& level, PongState state) : rules_(pong_rules(level)), state_(state) {}

std::span<const Action> PongGame::alphabet() const { return kPongAlphabet; }

std::int64_t PongGame::predict_intercept_y() const {
  Point p = state_.ball;
  Point v = state_.ball_velocity;
  for (int guard = 0; guard < 1000; ++guard) {
    const BallStep s = move_ball(p, v);
    if (s.crossing_y) return *s.crossing_y;
    p = s.position;
    v = s.velocity;
  }
  return p.y;
}

Transition PongGame::advance(Action action) {
  if (action == Action::UP) state_.paddle_y -= rules_.paddle_stride_px;
  if (action == Action::DOWN) state_.paddle_y += rules_.paddle_stride_px;
  state_.paddle_y = std::clamp<std::int64_t>(state_.paddle_y, 0, kCourtHeight - state_.paddle_height);

  const BallStep s = move_ball(state_.ball, state_.ball_velocity);
  state_.ball = s.position;
  state_.ball_velocity = s.velocity;
  if (s.crossing_y) {
    const std::int64_t y = *s.crossing_y;
    const bool hit = y < state_.paddle_y + state_.paddle_height && y + kBallSize > state_.paddle_y;
    if (!hit) {
      return {state_.returns, true, "Missed the ball."};
    }
    state_.ball = {kPaddleFace + s.overshoot, state_.ball.y};
    state_.ball_velocity.x = -state_.ball_velocity.x;
    // Off-center hits steer the ball; speed stays bounded by the level cap.
    const std::int64_t offset = (y + kBallSize / 2) - (state_.paddle_y + state_.paddle_height / 2);
    state_.ball_velocity.y =
        std::clamp(state_.ball_velocity.y + offset * rules_.ball_speed_y_max / state_.paddle_height,
                   -rules_.ball_speed_y_max, rules_.ball_speed_y_max);
    ++state_.returns;
    if (state_.returns >= rules_.score_cap)
      return {rules_.score_cap, true, fmt::format("Returned the ball {} times.", rules_.score_cap)};
    return {state_.returns, false, "Returned the ball."};
  }
  return {state_.returns, false, kInfoRunning};
}

void PongGame::draw(Canvas& canvas) const {
  canvas.clear(palette::kCourt);
  for (std::int64_t y = kHudHeight; y < canvas.height(); y += 24)
    canvas.fill_rect(kCourtWidth / 2 - 2, y, 4, 12, Color{60, 70, 120});
  canvas.fill_rect(kCourtWidth - 4, kHudHeight, 4, kCourtHeight, palette::kPaddle);
  canvas.fill_rect(kPaddleX, state_.paddle_y + kHudHeight, kPaddleThickness, state_.paddle_height, palette::kPaddle);
  canvas.fill_rect(state_.ball.x, state_.ball.y + kHudHeight, kBallSize, kBallSize, palette::kBall);
  draw_hud(canvas, fmt::format("RETURNS {}", state_.returns), "PONG");
}

}  // namespace pixelbench::games
