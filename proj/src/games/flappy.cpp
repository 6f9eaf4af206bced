#include "pixelbench/games/flappy.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "pixelbench/core/rng.hpp"
#include "pixelbench/games/common.hpp"

namespace pixelbench::games {
namespace {

// Gap centers keep this clearance from the ceiling and the ground.
constexpr std::int64_t kGapMargin = 40;

}  // namespace

FlappyRules flappy_rules(const LevelSpec& level) {
  FlappyRules r;
  r.gap_px = level.param("pipe_gap_px");
  r.forward_speed_px = level.param("forward_speed_px");
  r.pipe_spacing_px = level.param("pipe_spacing_px");
  r.pipe_width_px = level.param("pipe_width_px");
  r.first_pipe_x = level.param("first_pipe_x");
  r.max_gap_shift_px = level.param("max_gap_shift_px");
  r.score_cap = level.param("score_cap");
  return r;
}

FlappyGame::FlappyGame(const LevelSpec& level, SessionSeed seed) : rules_(flappy_rules(level)) {
  Rng rng(derive_seed(seed.value, {fnv1a64(level.key)}));
  const std::int64_t lo = rules_.gap_px / 2 + kGapMargin;
  const std::int64_t hi = kFlappyGroundY - rules_.gap_px / 2 - kGapMargin;
  state_.forward_speed = rules_.forward_speed_px;
  state_.bird_y = rng.between(200, 260);
  // Enough pipes that the cap is reachable, plus a couple on screen beyond it.
  const std::int64_t count = rules_.score_cap + 3;
  std::int64_t center = rng.between(std::max(lo, state_.bird_y + kFlappyBirdSize / 2 - rules_.max_gap_shift_px),
                                    std::min(hi, state_.bird_y + kFlappyBirdSize / 2 + rules_.max_gap_shift_px));
  std::int64_t previous_shift = 0;
  for (std::int64_t i = 0; i < count; ++i) {
    if (i > 0) {
      std::int64_t shift = rng.between(-rules_.max_gap_shift_px, rules_.max_gap_shift_px);
      // Gravity only accelerates the bird slowly, so a second consecutive
      // drop is halved to keep narrow gaps reachable.
      if (shift > 0 && previous_shift > 0) shift /= 2;
      const std::int64_t next = std::clamp(center + shift, lo, hi);
      previous_shift = next - center;
      center = next;
    }
    state_.pipes.push_back({rules_.first_pipe_x + i * rules_.pipe_spacing_px, center, rules_.gap_px, false});
  }
}

FlappyGame::FlappyGame(const LevelSpec& level, FlappyState state)
    : rules_(flappy_rules(level)), state_(std::move(state)) {}

std::span<const Action> FlappyGame::alphabet() const { return kFlappyAlphabet; }

const Pipe* FlappyGame::next_pipe() const {
  for (const Pipe& p : state_.pipes)
    if (p.x + rules_.pipe_width_px > kFlappyBirdX) return &p;
  return nullptr;
}

Transition FlappyGame::advance(Action action) {
  if (action == Action::FLAP)
    state_.bird_vy = kFlapVelocity;
  else
    state_.bird_vy += kFlappyGravity;
  state_.bird_y += state_.bird_vy;
  for (Pipe& p : state_.pipes) p.x -= state_.forward_speed;

  auto score = [&] { return std::min(state_.pipes_passed, rules_.score_cap); };
  const Rect bird{kFlappyBirdX, state_.bird_y, kFlappyBirdSize, kFlappyBirdSize};
  if (bird.y < 0) return {score(), true, "Hit the ceiling."};
  if (bird.bottom() > kFlappyGroundY) return {score(), true, "Hit the ground."};
  for (const Pipe& p : state_.pipes) {
    if (bird.x >= p.x + rules_.pipe_width_px || bird.right() <= p.x) continue;
    const std::int64_t gap_top = p.gap_center_y - p.gap_height / 2;
    const std::int64_t gap_bottom = gap_top + p.gap_height;
    if (bird.y < gap_top || bird.bottom() > gap_bottom) return {score(), true, "Crashed into a pipe."};
  }
  for (Pipe& p : state_.pipes) {
    if (!p.passed && p.x + rules_.pipe_width_px <= kFlappyBirdX) {
      p.passed = true;
      ++state_.pipes_passed;
    }
  }
  if (state_.pipes_passed >= rules_.score_cap)
    return {score(), true, fmt::format("Passed all {} pipes.", rules_.score_cap)};
  return {score(), false, kInfoRunning};
}

void FlappyGame::draw(Canvas& canvas) const {
  canvas.clear(palette::kSky);
  for (const Pipe& p : state_.pipes) {
    const std::int64_t gap_top = p.gap_center_y - p.gap_height / 2;
    const std::int64_t gap_bottom = gap_top + p.gap_height;
    canvas.fill_rect(p.x, 0, rules_.pipe_width_px, gap_top, palette::kPipe);
    canvas.fill_rect(p.x, gap_bottom, rules_.pipe_width_px, kFlappyGroundY - gap_bottom, palette::kPipe);
    canvas.fill_rect(p.x - 3, gap_top - 12, rules_.pipe_width_px + 6, 12, palette::kPipeEdge);
    canvas.fill_rect(p.x - 3, gap_bottom, rules_.pipe_width_px + 6, 12, palette::kPipeEdge);
  }
  canvas.fill_rect(0, kFlappyGroundY, canvas.width(), canvas.height() - kFlappyGroundY, palette::kGround);
  canvas.fill_rect(kFlappyBirdX, state_.bird_y, kFlappyBirdSize, kFlappyBirdSize, palette::kBird);
  canvas.fill_rect(kFlappyBirdX + 16, state_.bird_y + 6, 4, 4, palette::kBlack);
  canvas.fill_rect(kFlappyBirdX + 20, state_.bird_y + 12, 6, 4, palette::kSpike);
  canvas.draw_text(8, kFlappyGroundY + 16, fmt::format("SCORE {}", std::min(state_.pipes_passed, rules_.score_cap)),
                   palette::kBlack, 2);
}

}  // namespace pixelbench::games
