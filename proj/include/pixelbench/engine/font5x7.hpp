#pragma once

#include <array>
#include <cstdint>

namespace pixelbench::font {

// Each glyph is seven rows; bit 4 of a row is the leftmost column.
using Glyph = std::array<std::uint8_t, 7>;

// Returns the glyph for c, or nullptr when the font has none (lowercase
// letters map to uppercase).
const Glyph* glyph_for(char c);

}  // namespace pixelbench::font
