#include "pixelbench/engine/frame.hpp"

#include <algorithm>
#include <climits>
#include <cstdlib>

#include "pixelbench/core/digest.hpp"
#include "pixelbench/engine/font5x7.hpp"

namespace pixelbench {
namespace {

std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
  // den > 0
  std::int64_t q = num / den;
  if (num % den != 0 && num > 0) ++q;
  return q;
}

}  // namespace

std::string Frame::hash() const {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(pixels.size() + 8);
  for (int v : {width, height}) {
    for (int s = 0; s < 32; s += 8) bytes.push_back(static_cast<std::uint8_t>(v >> s));
  }
  bytes.insert(bytes.end(), pixels.begin(), pixels.end());
  return sha256_hex(bytes);
}

void Canvas::clear(Color c) {
  for (std::size_t i = 0; i < frame_.pixels.size(); i += 3) {
    frame_.pixels[i] = c.r;
    frame_.pixels[i + 1] = c.g;
    frame_.pixels[i + 2] = c.b;
  }
}

void Canvas::set(std::int64_t x, std::int64_t y, Color c) {
  if (x < 0 || y < 0 || x >= frame_.width || y >= frame_.height) return;
  const std::size_t i = (static_cast<std::size_t>(y) * frame_.width + static_cast<std::size_t>(x)) * 3;
  frame_.pixels[i] = c.r;
  frame_.pixels[i + 1] = c.g;
  frame_.pixels[i + 2] = c.b;
}

void Canvas::fill_rect(std::int64_t x, std::int64_t y, std::int64_t w, std::int64_t h, Color c) {
  const std::int64_t x0 = std::max<std::int64_t>(x, 0);
  const std::int64_t y0 = std::max<std::int64_t>(y, 0);
  const std::int64_t x1 = std::min<std::int64_t>(x + w, frame_.width);
  const std::int64_t y1 = std::min<std::int64_t>(y + h, frame_.height);
  for (std::int64_t yy = y0; yy < y1; ++yy)
    for (std::int64_t xx = x0; xx < x1; ++xx) set(xx, yy, c);
}

void Canvas::stroke_rect(std::int64_t x, std::int64_t y, std::int64_t w, std::int64_t h, Color c) {
  if (w <= 0 || h <= 0) return;
  fill_rect(x, y, w, 1, c);
  fill_rect(x, y + h - 1, w, 1, c);
  fill_rect(x, y, 1, h, c);
  fill_rect(x + w - 1, y, 1, h, c);
}

void Canvas::fill_circle(std::int64_t cx, std::int64_t cy, std::int64_t radius, Color c) {
  const std::int64_t r2 = radius * radius;
  for (std::int64_t dy = -radius; dy <= radius; ++dy)
    for (std::int64_t dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= r2) set(cx + dx, cy + dy, c);
}

void Canvas::draw_line(Point a, Point b, Color c) {
  std::int64_t x = a.x;
  std::int64_t y = a.y;
  const std::int64_t dx = std::llabs(b.x - a.x);
  const std::int64_t dy = -std::llabs(b.y - a.y);
  const std::int64_t sx = a.x < b.x ? 1 : -1;
  const std::int64_t sy = a.y < b.y ? 1 : -1;
  std::int64_t err = dx + dy;
  for (;;) {
    set(x, y, c);
    if (x == b.x && y == b.y) break;
    const std::int64_t e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
}

void Canvas::fill_convex(std::span<const Point> v, Color c) {
  if (v.size() < 3) return;
  std::int64_t ymin = INT64_MAX;
  std::int64_t ymax = INT64_MIN;
  for (const Point& p : v) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  ymin = std::max<std::int64_t>(ymin, 0);
  ymax = std::min<std::int64_t>(ymax, frame_.height);
  for (std::int64_t y = ymin; y < ymax; ++y) {
    const std::int64_t yc2 = 2 * y + 1;  // doubled row center
    std::int64_t lo = INT64_MAX;
    std::int64_t hi = INT64_MIN;
    for (std::size_t i = 0; i < v.size(); ++i) {
      Point a = v[i];
      Point b = v[(i + 1) % v.size()];
      if (a.y == b.y) continue;
      if (a.y > b.y) std::swap(a, b);
      if (yc2 < 2 * a.y || yc2 >= 2 * b.y) continue;
      // Crossing x = a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y), doubled.
      const std::int64_t den = b.y - a.y;
      const std::int64_t num = 2 * a.x * den + (yc2 - 2 * a.y) * (b.x - a.x);
      // First pixel whose center is at or right of the crossing.
      const std::int64_t first = ceil_div(num - den, 2 * den);
      lo = std::min(lo, first);
      hi = std::max(hi, first);
    }
    if (lo == INT64_MAX) continue;
    for (std::int64_t x = std::max<std::int64_t>(lo, 0); x < std::min<std::int64_t>(hi, frame_.width); ++x)
      set(x, y, c);
  }
}

void Canvas::draw_text(std::int64_t x, std::int64_t y, std::string_view text, Color c, int scale) {
  std::int64_t pen = x;
  for (char ch : text) {
    if (const font::Glyph* g = font::glyph_for(ch)) {
      for (int row = 0; row < 7; ++row)
        for (int col = 0; col < 5; ++col)
          if ((*g)[row] & (0x10 >> col)) fill_rect(pen + col * scale, y + row * scale, scale, scale, c);
    }
    pen += 6 * scale;
  }
}

std::int64_t text_width(std::string_view text, int scale) {
  if (text.empty()) return 0;
  return static_cast<std::int64_t>(text.size()) * 6 * scale - scale;
}

}  // namespace pixelbench
