#include "pixelbench/games/tempest.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "pixelbench/core/rng.hpp"
#include "pixelbench/games/common.hpp"

namespace pixelbench::games {

TempestRules tempest_rules(const LevelSpec& level) {
  TempestRules r;
  r.lane_count = static_cast<int>(level.param("lane_count"));
  r.spawn_interval_slots = level.param("barrier_spawn_interval_steps");
  r.view_depth_slots = level.param("view_depth_slots");
  r.track_length_slots = level.param("track_length_slots");
  r.first_barrier_slot = level.param("first_barrier_slot");
  r.score_per_slot = level.param("score_per_slot");
  return r;
}

std::vector<std::vector<TrackEntity>> generate_track(const TempestRules& rules, std::uint64_t seed) {
  Rng rng(seed);
  const auto lanes = static_cast<std::size_t>(rules.lane_count);
  // A couple of spare slots past the finish so DASH never indexes out.
  std::vector<std::vector<TrackEntity>> track(static_cast<std::size_t>(rules.track_length_slots + 2),
                                              std::vector<TrackEntity>(lanes, TrackEntity::empty));
  std::vector<int> order(lanes);
  for (std::int64_t slot = rules.first_barrier_slot; slot < rules.track_length_slots;
       slot += rules.spawn_interval_slots) {
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span(order));
    const auto count = static_cast<std::size_t>(rng.between(1, rules.lane_count - 1));
    for (std::size_t i = 0; i < count; ++i) {
      const auto kind = static_cast<TrackEntity>(1 + rng.below(3));
      track[static_cast<std::size_t>(slot)][static_cast<std::size_t>(order[i])] = kind;
    }
  }
  return track;
}

RunnerStep apply_runner_action(TempestState& s, const TempestRules& rules, Action action) {
  int advance_slots = 1;
  switch (action) {
    case Action::LEFT: s.lane = (s.lane + rules.lane_count - 1) % rules.lane_count; break;
    case Action::RIGHT: s.lane = (s.lane + 1) % rules.lane_count; break;
    case Action::JUMP:
      s.mode = RunnerMode::jump;
      s.mode_remaining = kManeuverSlots;
      break;
    case Action::SLIDE:
      s.mode = RunnerMode::slide;
      s.mode_remaining = kManeuverSlots;
      break;
    case Action::DASH:
      if (s.mode == RunnerMode::run) advance_slots = 2;
      break;
    default: break;
  }
  RunnerStep out;
  for (int i = 0; i < advance_slots && s.distance < rules.track_length_slots; ++i) {
    ++s.distance;
    auto& cell = s.track[static_cast<std::size_t>(s.distance)][static_cast<std::size_t>(s.lane)];
    switch (cell) {
      case TrackEntity::red_spike:
        if (s.mode != RunnerMode::jump) return {true, "Crashed into a red spike."};
        out.info = "Jumped over a red spike.";
        break;
      case TrackEntity::purple_wall: return {true, "Crashed into a purple wall."};
      case TrackEntity::green_enemy:
        if (s.mode != RunnerMode::slide) return {true, "Failed to deal with a green enemy."};
        cell = TrackEntity::empty;
        out.info = "Eliminated a green enemy.";
        break;
      case TrackEntity::empty: break;
    }
    if (s.mode_remaining > 0 && --s.mode_remaining == 0) s.mode = RunnerMode::run;
  }
  return out;
}

Point project_tunnel_point(std::int64_t lateral, std::int64_t vertical, std::int64_t depth) {
  return {kTunnelCenterX + floor_div(lateral * kTunnelFocal, depth),
          kTunnelHorizonY + floor_div(vertical * kTunnelFocal, depth)};
}

TempestGame::TempestGame(const LevelSpec& level, SessionSeed seed) : rules_(tempest_rules(level)) {
  Rng rng(derive_seed(seed.value, {fnv1a64(level.key)}));
  state_.lane = static_cast<int>(rng.below(static_cast<std::uint64_t>(rules_.lane_count)));
  state_.track = generate_track(rules_, rng.next_u64());
}

TempestGame::TempestGame(const LevelSpec& level, TempestState state)
    : rules_(tempest_rules(level)), state_(std::move(state)) {}

std::span<const Action> TempestGame::alphabet() const { return kTempestAlphabet; }

std::int64_t TempestGame::score() const { return state_.distance * rules_.score_per_slot; }

Transition TempestGame::advance(Action action) {
  const RunnerStep step = apply_runner_action(state_, rules_, action);
  if (step.dead) return {score(), true, step.info};
  if (state_.distance >= rules_.track_length_slots) return {score(), true, "Reached the end of the tunnel."};
  return {score(), false, step.info.empty() ? std::string(kInfoRunning) : step.info};
}

void TempestGame::draw(Canvas& canvas) const {
  canvas.clear(palette::kBlack);
  const std::int64_t half = rules_.lane_count * kLaneWidth / 2;
  auto lane_left = [&](int lane) { return -half + lane * kLaneWidth; };
  const std::int64_t far = kNearDepth + rules_.view_depth_slots * kSlotDepth;

  // Tunnel cross-sections at each slot boundary in view.
  for (std::int64_t k = 0; k <= rules_.view_depth_slots; ++k) {
    const std::int64_t z = kNearDepth + k * kSlotDepth;
    const Point fl = project_tunnel_point(-half, kEyeHeight, z);
    const Point fr = project_tunnel_point(half, kEyeHeight, z);
    const Point cl = project_tunnel_point(-half, -kCeilingHeight, z);
    const Point cr = project_tunnel_point(half, -kCeilingHeight, z);
    canvas.draw_line(fl, fr, palette::kTunnel);
    canvas.draw_line(cl, cr, palette::kTunnel);
    canvas.draw_line(fl, cl, palette::kTunnel);
    canvas.draw_line(fr, cr, palette::kTunnel);
  }
  // Lane edges along the floor, plus the ceiling corners.
  for (int i = 0; i <= rules_.lane_count; ++i) {
    const std::int64_t x = -half + i * kLaneWidth;
    canvas.draw_line(project_tunnel_point(x, kEyeHeight, kNearDepth), project_tunnel_point(x, kEyeHeight, far),
                     palette::kTunnel);
  }
  canvas.draw_line(project_tunnel_point(-half, -kCeilingHeight, kNearDepth),
                   project_tunnel_point(-half, -kCeilingHeight, far), palette::kTunnel);
  canvas.draw_line(project_tunnel_point(half, -kCeilingHeight, kNearDepth),
                   project_tunnel_point(half, -kCeilingHeight, far), palette::kTunnel);

  // Entities, far to near so nearer ones overdraw.
  for (std::int64_t k = rules_.view_depth_slots; k >= 1; --k) {
    const std::int64_t slot = state_.distance + k;
    if (slot >= static_cast<std::int64_t>(state_.track.size())) continue;
    const std::int64_t z0 = kNearDepth + k * kSlotDepth - kSlotDepth / 2;
    const std::int64_t z1 = z0 + kSlotDepth / 4;
    for (int lane = 0; lane < rules_.lane_count; ++lane) {
      const TrackEntity e = state_.track[static_cast<std::size_t>(slot)][static_cast<std::size_t>(lane)];
      if (e == TrackEntity::empty) continue;
      const std::int64_t x0 = lane_left(lane) + 15;
      const std::int64_t x1 = lane_left(lane) + kLaneWidth - 15;
      const std::int64_t xm = (x0 + x1) / 2;
      if (e == TrackEntity::red_spike) {
        const Point tri[] = {project_tunnel_point(x0, kEyeHeight, z0), project_tunnel_point(x1, kEyeHeight, z0),
                             project_tunnel_point(xm, kEyeHeight - 40, z0)};
        canvas.fill_convex(tri, palette::kSpike);
      } else if (e == TrackEntity::purple_wall) {
        const Point quad[] = {project_tunnel_point(x0, -kCeilingHeight, z0),
                              project_tunnel_point(x1, -kCeilingHeight, z0),
                              project_tunnel_point(x1, kEyeHeight, z0), project_tunnel_point(x0, kEyeHeight, z0)};
        canvas.fill_convex(quad, palette::kPurple);
      } else {
        const Point quad[] = {project_tunnel_point(x0 + 10, kEyeHeight - 70, z1),
                              project_tunnel_point(x1 - 10, kEyeHeight - 70, z1),
                              project_tunnel_point(x1 - 10, kEyeHeight, z1),
                              project_tunnel_point(x0 + 10, kEyeHeight, z1)};
        canvas.fill_convex(quad, palette::kEnemy);
      }
    }
  }

  // Runner at the near plane: tall when running, raised when jumping,
  // squashed when sliding.
  const std::int64_t rx0 = lane_left(state_.lane) + 30;
  const std::int64_t rx1 = lane_left(state_.lane) + kLaneWidth - 30;
  std::int64_t top = kEyeHeight - 60;
  std::int64_t bottom = kEyeHeight;
  if (state_.mode == RunnerMode::jump) {
    top -= 40;
    bottom -= 40;
  } else if (state_.mode == RunnerMode::slide) {
    top = kEyeHeight - 20;
  }
  const Point a = project_tunnel_point(rx0, top, kNearDepth);
  const Point b = project_tunnel_point(rx1, bottom, kNearDepth);
  canvas.fill_rect(a.x, a.y, b.x - a.x, b.y - a.y, palette::kWhite);
  canvas.stroke_rect(a.x, a.y, b.x - a.x, b.y - a.y, palette::kTunnel);

  draw_hud(canvas, fmt::format("DISTANCE {}", state_.distance), fmt::format("SCORE {}", score()));
}

}  // namespace pixelbench::games
