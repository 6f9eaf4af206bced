#include "pixelbench/games/race.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>

#include <fmt/format.h>

#include "pixelbench/core/errors.hpp"
#include "pixelbench/core/rng.hpp"
#include "pixelbench/games/common.hpp"

namespace pixelbench::games {
namespace {

constexpr Rect kArena{0, 0, kRaceArenaWidth, kRaceArenaHeight};
// First-person motion is integrated in sub-steps of at most this many px so
// fast cars cannot tunnel through thin walls.
constexpr std::int64_t kMaxSubstepPx = 8;
// Screen position of the car in the first-person view.
constexpr std::int64_t kEgoX = 256;
constexpr std::int64_t kEgoY = 352;

constexpr Color kFog{16, 18, 24};
constexpr Color kWindow{30, 30, 50};
constexpr Color kTrophyBase{150, 110, 20};

}  // namespace

RaceRules race_rules(const LevelSpec& level) {
  RaceRules r;
  r.stride_px = level.param("stride_px");
  r.car_px = level.param("car_px");
  if (level.perspective == Perspective::first_person) {
    r.speed_unit_px = level.param("speed_unit_px");
    r.max_speed = level.param("max_speed");
    r.view_radius_px = level.param("view_radius_px");
  }
  return r;
}

RaceGrid::RaceGrid(const RaceRules& rules, std::span<const Rect> obstacles) : stride_(rules.stride_px) {
  cols_ = static_cast<int>((kRaceArenaWidth - rules.car_px) / stride_ + 1);
  rows_ = static_cast<int>((kRaceArenaHeight - rules.car_px) / stride_ + 1);
  free_.assign(static_cast<std::size_t>(cols_ * rows_), 1);
  for (int row = 0; row < rows_; ++row) {
    for (int col = 0; col < cols_; ++col) {
      const Rect cell{col * stride_, row * stride_, rules.car_px, rules.car_px};
      for (const Rect& o : obstacles) {
        if (cell.overlaps(o)) {
          free_[static_cast<std::size_t>(index(col, row))] = 0;
          break;
        }
      }
    }
  }
}

bool RaceGrid::free(int col, int row) const {
  if (col < 0 || row < 0 || col >= cols_ || row >= rows_) return false;
  return free_[static_cast<std::size_t>(index(col, row))] != 0;
}

Point RaceGrid::origin(int col, int row) const { return {col * stride_, row * stride_}; }

std::optional<std::pair<int, int>> RaceGrid::cell_of(Point p) const {
  if (p.x % stride_ != 0 || p.y % stride_ != 0) return std::nullopt;
  const int col = static_cast<int>(p.x / stride_);
  const int row = static_cast<int>(p.y / stride_);
  if (col < 0 || row < 0 || col >= cols_ || row >= rows_) return std::nullopt;
  return std::pair{col, row};
}

std::vector<int> RaceGrid::distances_from(int col, int row) const {
  std::vector<int> dist(free_.size(), -1);
  if (!free(col, row)) return dist;
  std::deque<std::pair<int, int>> queue{{col, row}};
  dist[static_cast<std::size_t>(index(col, row))] = 0;
  constexpr int kDx[] = {0, 0, -1, 1};
  constexpr int kDy[] = {-1, 1, 0, 0};
  while (!queue.empty()) {
    auto [c, r] = queue.front();
    queue.pop_front();
    const int d = dist[static_cast<std::size_t>(index(c, r))];
    for (int k = 0; k < 4; ++k) {
      const int nc = c + kDx[k];
      const int nr = r + kDy[k];
      if (!free(nc, nr)) continue;
      int& slot = dist[static_cast<std::size_t>(index(nc, nr))];
      if (slot >= 0) continue;
      slot = d + 1;
      queue.emplace_back(nc, nr);
    }
  }
  return dist;
}

RaceGame::RaceGame(const LevelSpec& level, SessionSeed seed) : rules_(race_rules(level)) {
  state_.perspective = level.perspective;
  state_.obstacles = level.geometry.solids;
  const RaceGrid grid(rules_, state_.obstacles);
  std::vector<int> free_cells;
  for (int row = 0; row < grid.rows(); ++row)
    for (int col = 0; col < grid.cols(); ++col)
      if (grid.free(col, row)) free_cells.push_back(grid.index(col, row));
  if (free_cells.empty()) throw ConfigError(fmt::format("level {} has no free cells", level.key));

  const std::int64_t min_path = level.param("min_path_steps");
  const std::int64_t max_path = level.param("max_path_steps");
  Rng rng(derive_seed(seed.value, {fnv1a64(level.key)}));
  for (int attempt = 0; attempt < 4096; ++attempt) {
    const int car_cell = free_cells[rng.below(free_cells.size())];
    const int car_col = car_cell % grid.cols();
    const int car_row = car_cell / grid.cols();
    const auto dist = grid.distances_from(car_col, car_row);
    std::vector<int> candidates;
    for (int cell : free_cells) {
      const int d = dist[static_cast<std::size_t>(cell)];
      if (d >= min_path && d <= max_path) candidates.push_back(cell);
    }
    if (candidates.empty()) continue;
    const int trophy_cell = candidates[rng.below(candidates.size())];
    state_.trophy = grid.origin(trophy_cell % grid.cols(), trophy_cell / grid.cols());
    const Point car = grid.origin(car_col, car_row);
    if (state_.perspective == Perspective::first_person) {
      state_.car = {(car.x * 2 + rules_.car_px) * kFixed / 2, (car.y * 2 + rules_.car_px) * kFixed / 2};
      state_.heading = static_cast<int>(rng.below(kHeadingCount));
    } else {
      state_.car = car;
    }
    return;
  }
  throw ConfigError(fmt::format("level {} cannot place car and trophy within the path envelope", level.key));
}

RaceGame::RaceGame(const LevelSpec& level, RaceState state) : rules_(race_rules(level)), state_(std::move(state)) {}

std::span<const Action> RaceGame::alphabet() const {
  if (state_.perspective == Perspective::first_person) return kRaceFirstPersonAlphabet;
  return kRaceMapAlphabet;
}

Rect RaceGame::car_rect() const {
  if (state_.perspective == Perspective::first_person) {
    const std::int64_t cx = floor_div(state_.car.x, kFixed);
    const std::int64_t cy = floor_div(state_.car.y, kFixed);
    return {cx - rules_.car_px / 2, cy - rules_.car_px / 2, rules_.car_px, rules_.car_px};
  }
  return {state_.car.x, state_.car.y, rules_.car_px, rules_.car_px};
}

bool RaceGame::blocked(const Rect& r) const {
  if (!kArena.contains(r)) return true;
  for (const Rect& o : state_.obstacles)
    if (r.overlaps(o)) return true;
  return false;
}

Transition RaceGame::advance(Action action) {
  return state_.perspective == Perspective::first_person ? step_first_person(action) : step_map(action);
}

Transition RaceGame::step_map(Action action) {
  std::int64_t dx = 0;
  std::int64_t dy = 0;
  switch (action) {
    case Action::UP: dy = -rules_.stride_px; break;
    case Action::DOWN: dy = rules_.stride_px; break;
    case Action::LEFT: dx = -rules_.stride_px; break;
    case Action::RIGHT: dx = rules_.stride_px; break;
    default: break;
  }
  if (dx == 0 && dy == 0) return {0, false, kInfoRunning};
  const Rect next{state_.car.x + dx, state_.car.y + dy, rules_.car_px, rules_.car_px};
  if (!kArena.contains(next)) return {0, false, "The car was blocked by the arena wall."};
  for (const Rect& o : state_.obstacles)
    if (next.overlaps(o)) return {0, false, "The car was blocked by an obstacle."};
  state_.car = {next.x, next.y};
  if (next.overlaps(trophy_rect())) return {100, true, "Reached the trophy."};
  return {0, false, kInfoRunning};
}

Transition RaceGame::step_first_person(Action action) {
  switch (action) {
    case Action::TURN_LEFT: state_.heading = (state_.heading + kHeadingCount - 1) % kHeadingCount; break;
    case Action::TURN_RIGHT: state_.heading = (state_.heading + 1) % kHeadingCount; break;
    case Action::ACCELERATE: state_.speed = std::min(state_.speed + 1, rules_.max_speed); break;
    case Action::BRAKE: state_.speed = std::max(state_.speed - 1, rules_.min_speed); break;
    default: break;
  }
  const Point dir = kHeadingVectors[static_cast<std::size_t>(state_.heading)];
  const Point velocity{dir.x * state_.speed * rules_.speed_unit_px, dir.y * state_.speed * rules_.speed_unit_px};
  const std::int64_t span = std::max(std::llabs(velocity.x), std::llabs(velocity.y));
  const std::int64_t substeps = std::max<std::int64_t>(1, (span + kMaxSubstepPx * kFixed - 1) / (kMaxSubstepPx * kFixed));
  const Point start = state_.car;
  for (std::int64_t k = 1; k <= substeps; ++k) {
    state_.car = {start.x + velocity.x * k / substeps, start.y + velocity.y * k / substeps};
    const Rect footprint = car_rect();
    if (blocked(footprint)) return {0, true, "Crashed into a wall."};
    if (footprint.overlaps(trophy_rect())) return {100, true, "Reached the trophy."};
  }
  return {0, false, kInfoRunning};
}

void RaceGame::draw(Canvas& canvas) const {
  if (state_.perspective == Perspective::first_person)
    draw_first_person(canvas);
  else
    draw_map(canvas);
}

void RaceGame::draw_map(Canvas& canvas) const {
  canvas.clear(palette::kAsphalt);
  for (const Rect& o : state_.obstacles) canvas.fill_rect(o.x, o.y + kHudHeight, o.w, o.h, palette::kObstacle);
  const Rect t = trophy_rect();
  canvas.fill_rect(t.x, t.y + kHudHeight, t.w, t.h, palette::kTrophy);
  canvas.fill_rect(t.x, t.y + kHudHeight + t.h - 4, t.w, 4, kTrophyBase);
  const Rect c = car_rect();
  canvas.fill_rect(c.x, c.y + kHudHeight, c.w, c.h, palette::kCar);
  canvas.fill_rect(c.x + 4, c.y + kHudHeight + 2, c.w - 8, 4, kWindow);
  draw_hud(canvas, "RACE MAP VIEW", "GOAL: TROPHY");
}

void RaceGame::draw_first_person(Canvas& canvas) const {
  const Point forward = kHeadingVectors[static_cast<std::size_t>(state_.heading)];
  const Point right = kHeadingVectors[static_cast<std::size_t>((state_.heading + 2) % kHeadingCount)];
  const std::int64_t radius2 = rules_.view_radius_px * rules_.view_radius_px;
  const Rect trophy = trophy_rect();
  for (std::int64_t sy = kHudHeight; sy < canvas.height(); ++sy) {
    for (std::int64_t sx = 0; sx < canvas.width(); ++sx) {
      const std::int64_t dx = sx - kEgoX;
      const std::int64_t dy = sy - kEgoY;
      if (dx * dx + dy * dy > radius2) {
        canvas.set(sx, sy, kFog);
        continue;
      }
      const std::int64_t wx = floor_div(state_.car.x + right.x * dx - forward.x * dy, kFixed);
      const std::int64_t wy = floor_div(state_.car.y + right.y * dx - forward.y * dy, kFixed);
      const Rect px{wx, wy, 1, 1};
      Color c = palette::kAsphalt;
      if (!kArena.contains(px)) {
        c = palette::kWall;
      } else if (trophy.overlaps(px)) {
        c = palette::kTrophy;
      } else {
        for (const Rect& o : state_.obstacles) {
          if (o.overlaps(px)) {
            c = palette::kObstacle;
            break;
          }
        }
      }
      canvas.set(sx, sy, c);
    }
  }
  const std::int64_t half = rules_.car_px / 2;
  const Point body[] = {{kEgoX, kEgoY - half - 4}, {kEgoX + half, kEgoY + half}, {kEgoX - half, kEgoY + half}};
  canvas.fill_convex(body, palette::kCar);
  draw_hud(canvas, fmt::format("SPEED {}", state_.speed), "RACE FIRST PERSON");
}

}  // namespace pixelbench::games
