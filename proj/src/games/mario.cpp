#include "pixelbench/games/mario.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "pixelbench/core/errors.hpp"
#include "pixelbench/games/common.hpp"

namespace pixelbench::games {

MarioRules mario_rules(const LevelSpec& level) {
  MarioRules r;
  r.stride_px = level.param("stride_px");
  r.jump_velocity = level.param("jump_velocity");
  r.gravity = level.param("gravity");
  r.max_fall_speed = level.param("max_fall_speed");
  if (!level.geometry.goal_x) throw ConfigError(fmt::format("level {} has no goal_x", level.key));
  r.goal_x = *level.geometry.goal_x;
  r.completion_score = static_cast<std::int64_t>(level.human_max_score);
  return r;
}

// Terrain is authored, so the seed does not move anything.
MarioGame::MarioGame(const LevelSpec& level, SessionSeed)
    : rules_(mario_rules(level)), solids_(level.geometry.solids), hazards_(level.geometry.hazards) {
  state_.player = {kMarioStartX, kMarioGroundY - kMarioHeight};
}

MarioGame::MarioGame(const LevelSpec& level, MarioState state)
    : rules_(mario_rules(level)), solids_(level.geometry.solids), hazards_(level.geometry.hazards), state_(state) {}

std::span<const Action> MarioGame::alphabet() const { return kMarioAlphabet; }

std::int64_t MarioGame::score() const {
  const std::int64_t travelled = std::clamp<std::int64_t>(state_.progress_x - kMarioStartX, 0, finish_x() - kMarioStartX);
  return rules_.completion_score * travelled / (finish_x() - kMarioStartX);
}

Transition MarioGame::advance(Action action) {
  std::int64_t dx = 0;
  if (action == Action::LEFT || action == Action::JUMP_LEFT) dx = -rules_.stride_px;
  if (action == Action::RIGHT || action == Action::JUMP_RIGHT) dx = rules_.stride_px;
  const bool jump = action == Action::JUMP || action == Action::JUMP_LEFT || action == Action::JUMP_RIGHT;

  // Horizontal pass.
  state_.player.x = std::max<std::int64_t>(0, state_.player.x + dx);
  for (const Rect& s : solids_) {
    const Rect p = player_rect();
    if (!p.overlaps(s)) continue;
    state_.player.x = dx > 0 ? s.x - kMarioWidth : s.right();
  }

  // Vertical pass. Jumping needs ground contact; in the air it is ignored.
  if (jump && state_.grounded)
    state_.player_vy = -rules_.jump_velocity;
  else
    state_.player_vy = std::min(state_.player_vy + rules_.gravity, rules_.max_fall_speed);
  state_.player.y += state_.player_vy;
  bool landed = false;
  for (const Rect& s : solids_) {
    const Rect p = player_rect();
    if (!p.overlaps(s)) continue;
    if (state_.player_vy > 0) {
      state_.player.y = s.y - kMarioHeight;
      landed = true;
    } else {
      state_.player.y = s.bottom();
    }
    state_.player_vy = 0;
  }
  state_.grounded = landed;

  state_.progress_x = std::max(state_.progress_x, state_.player.x);
  const Rect p = player_rect();
  for (const Rect& h : hazards_)
    if (p.overlaps(h)) return {score(), true, "Touched a hazard."};
  if (p.y >= kMarioWorldBottom) return {score(), true, "Fell into a pit."};
  if (state_.player.x >= finish_x()) return {score(), true, "Reached the flag."};
  return {score(), false, kInfoRunning};
}

void MarioGame::draw(Canvas& canvas) const {
  const std::int64_t world_width = rules_.goal_x + 96;
  const std::int64_t cam =
      std::clamp<std::int64_t>(state_.player.x - kMarioCameraLead, 0, std::max<std::int64_t>(0, world_width - canvas.width()));
  canvas.clear(palette::kSky);
  for (const Rect& s : solids_) canvas.fill_rect(s.x - cam, s.y, s.w, s.h, palette::kBrick);
  for (const Rect& s : solids_) canvas.stroke_rect(s.x - cam, s.y, s.w, s.h, Color{120, 60, 20});
  for (const Rect& h : hazards_) canvas.fill_rect(h.x - cam, h.y, h.w, h.h, palette::kHazard);
  const std::int64_t flag_x = rules_.goal_x - cam;
  canvas.fill_rect(flag_x, kMarioGroundY - 160, 4, 160, palette::kWhite);
  canvas.fill_rect(flag_x + 4, kMarioGroundY - 160, 28, 20, palette::kFlag);
  canvas.fill_rect(state_.player.x - cam, state_.player.y, kMarioWidth, kMarioHeight, palette::kPlayer);
  canvas.fill_rect(state_.player.x - cam, state_.player.y, kMarioWidth, 8, Color{120, 40, 20});
  draw_hud(canvas, fmt::format("SCORE {}", score()), "SUPER MARIO");
}

}  // namespace pixelbench::games
