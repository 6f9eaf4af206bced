#pragma once

#include <cstdint>
#include <string_view>

#include "pixelbench/engine/frame.hpp"

namespace pixelbench::games {

namespace palette {
inline constexpr Color kBlack{0, 0, 0};
inline constexpr Color kWhite{255, 255, 255};
inline constexpr Color kHudBand{24, 24, 32};
inline constexpr Color kGrass{70, 150, 70};
inline constexpr Color kAsphalt{96, 96, 104};
inline constexpr Color kWall{40, 40, 48};
inline constexpr Color kObstacle{150, 80, 40};
inline constexpr Color kCar{220, 30, 30};
inline constexpr Color kTrophy{250, 200, 30};
inline constexpr Color kSky{110, 190, 240};
inline constexpr Color kPipe{40, 170, 60};
inline constexpr Color kPipeEdge{20, 110, 40};
inline constexpr Color kGround{200, 160, 90};
inline constexpr Color kBird{250, 220, 40};
inline constexpr Color kCourt{10, 20, 60};
inline constexpr Color kPaddle{240, 240, 240};
inline constexpr Color kBall{250, 250, 120};
inline constexpr Color kBrick{180, 90, 40};
inline constexpr Color kHazard{200, 30, 160};
inline constexpr Color kPlayer{230, 40, 40};
inline constexpr Color kFlag{40, 200, 60};
inline constexpr Color kTunnel{40, 90, 255};
inline constexpr Color kSpike{235, 30, 30};
inline constexpr Color kPurple{150, 40, 200};
inline constexpr Color kEnemy{40, 220, 60};
}  // namespace palette

inline constexpr std::int64_t kHudHeight = 32;

// Dark band across the top of the frame with left- and right-aligned labels.
void draw_hud(Canvas& canvas, std::string_view left, std::string_view right);

// Floor division for signed operands (den != 0).
constexpr std::int64_t floor_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return q;
}

}  // namespace pixelbench::games
