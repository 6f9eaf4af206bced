#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pixelbench/engine/game.hpp"

namespace pixelbench::games {

// Race arena in world pixels; the screen shows it below the HUD band.
inline constexpr std::int64_t kRaceArenaWidth = 512;
inline constexpr std::int64_t kRaceArenaHeight = 480;
// Fixed-point scale of first-person positions and heading vectors.
inline constexpr std::int64_t kFixed = 256;
inline constexpr int kHeadingCount = 8;

// Heading h points along kHeadingVectors[h] (scaled by kFixed); 0 is up,
// indices advance clockwise in 45 degree increments.
inline constexpr std::array<Point, kHeadingCount> kHeadingVectors{{
    {0, -256}, {181, -181}, {256, 0}, {181, 181}, {0, 256}, {-181, 181}, {-256, 0}, {-181, -181},
}};

struct RaceState {
  Perspective perspective = Perspective::map_view;
  // Map view: top-left corner in world px. First person: car center in
  // world px scaled by kFixed.
  Point car;
  int heading = 0;
  std::int64_t speed = 0;
  // Top-left corner in world px.
  Point trophy;
  std::vector<Rect> obstacles;
};

struct RaceRules {
  std::int64_t stride_px = 20;
  std::int64_t car_px = 20;
  std::int64_t speed_unit_px = 8;
  std::int64_t max_speed = 3;
  std::int64_t min_speed = -1;
  std::int64_t view_radius_px = 200;
};

class RaceGame final : public Game {
 public:
  RaceGame(const LevelSpec& level, SessionSeed seed);
  RaceGame(const LevelSpec& level, RaceState state);

  GameId id() const override { return GameId::race; }
  std::span<const Action> alphabet() const override;
  Transition advance(Action action) override;
  void draw(Canvas& canvas) const override;
  std::unique_ptr<Game> clone() const override { return std::make_unique<RaceGame>(*this); }

  const RaceState& state() const { return state_; }
  const RaceRules& rules() const { return rules_; }

  // Car footprint in world px for either perspective.
  Rect car_rect() const;
  Rect trophy_rect() const { return {state_.trophy.x, state_.trophy.y, rules_.car_px, rules_.car_px}; }
  bool blocked(const Rect& r) const;

 private:
  Transition step_map(Action action);
  Transition step_first_person(Action action);
  void draw_map(Canvas& canvas) const;
  void draw_first_person(Canvas& canvas) const;

  RaceRules rules_;
  RaceState state_;
};

inline constexpr std::array<Action, 5> kRaceMapAlphabet{Action::UP, Action::DOWN, Action::LEFT, Action::RIGHT,
                                                        Action::NONE};
inline constexpr std::array<Action, 5> kRaceFirstPersonAlphabet{Action::ACCELERATE, Action::BRAKE,
                                                                Action::TURN_LEFT, Action::TURN_RIGHT,
                                                                Action::NONE};

// Stride-grid occupancy shared by spawning and the map-view oracle. Cell
// (col, row) is the car footprint at world (col * stride, row * stride).
class RaceGrid {
 public:
  RaceGrid(const RaceRules& rules, std::span<const Rect> obstacles);

  int cols() const { return cols_; }
  int rows() const { return rows_; }
  bool free(int col, int row) const;
  Point origin(int col, int row) const;
  std::optional<std::pair<int, int>> cell_of(Point top_left) const;
  // Breadth-first distances in grid moves from (col, row); -1 if unreachable.
  std::vector<int> distances_from(int col, int row) const;
  int index(int col, int row) const { return row * cols_ + col; }

 private:
  std::int64_t stride_;
  int cols_ = 0;
  int rows_ = 0;
  std::vector<char> free_;
};

RaceRules race_rules(const LevelSpec& level);

}  // namespace pixelbench::games
