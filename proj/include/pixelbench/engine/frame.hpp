#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pixelbench {

inline constexpr int kFrameSize = 512;

struct Color {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend constexpr bool operator==(const Color&, const Color&) = default;
};

struct Point {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend constexpr bool operator==(const Point&, const Point&) = default;
};

// Row-major RGB8 raster. The only channel through which game state reaches
// a model or a human player.
struct Frame {
  int width = kFrameSize;
  int height = kFrameSize;
  std::vector<std::uint8_t> pixels;
  std::int64_t step_index = 0;

  Frame() = default;
  Frame(int w, int h, std::int64_t step = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0), step_index(step) {}

  Color at(int x, int y) const {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }

  // SHA-256 of the pixel buffer (dimensions folded in).
  std::string hash() const;

  friend bool operator==(const Frame& a, const Frame& b) {
    return a.width == b.width && a.height == b.height && a.pixels == b.pixels;
  }
};

// Integer software rasterizer over a Frame. All primitives clip to the frame.
class Canvas {
 public:
  explicit Canvas(Frame& frame) : frame_(frame) {}

  int width() const { return frame_.width; }
  int height() const { return frame_.height; }

  void clear(Color c);
  void set(std::int64_t x, std::int64_t y, Color c);
  void fill_rect(std::int64_t x, std::int64_t y, std::int64_t w, std::int64_t h, Color c);
  void stroke_rect(std::int64_t x, std::int64_t y, std::int64_t w, std::int64_t h, Color c);
  void fill_circle(std::int64_t cx, std::int64_t cy, std::int64_t radius, Color c);
  // Bresenham segment, inclusive of both endpoints.
  void draw_line(Point a, Point b, Color c);
  // Scanline fill of a convex polygon; pixel (x, y) is covered when its
  // center (x + 0.5, y + 0.5) lies inside.
  void fill_convex(std::span<const Point> vertices, Color c);
  // 5x7 bitmap glyphs, one column of spacing, each font pixel scale x scale.
  void draw_text(std::int64_t x, std::int64_t y, std::string_view text, Color c, int scale = 2);

 private:
  Frame& frame_;
};

// Width in pixels that draw_text would cover.
std::int64_t text_width(std::string_view text, int scale = 2);

}  // namespace pixelbench
