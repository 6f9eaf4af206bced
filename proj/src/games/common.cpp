#include "pixelbench/games/common.hpp"

namespace pixelbench::games {

void draw_hud(Canvas& canvas, std::string_view left, std::string_view right) {
  canvas.fill_rect(0, 0, canvas.width(), kHudHeight, palette::kHudBand);
  canvas.draw_text(8, 9, left, palette::kWhite, 2);
  canvas.draw_text(canvas.width() - 8 - text_width(right, 2), 9, right, palette::kWhite, 2);
}

}  // namespace pixelbench::games
