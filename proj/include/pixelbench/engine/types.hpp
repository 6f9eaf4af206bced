#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pixelbench {

enum class GameId { race, flappybird, pong, supermario, tempestrun };

enum class Perspective { map_view, first_person, side_scroll, tunnel };

// Union of every game's action tokens. Each level exposes the subset that
// forms its alphabet; NONE belongs to all of them.
enum class Action : std::uint8_t {
  NONE,
  UP,
  DOWN,
  LEFT,
  RIGHT,
  ACCELERATE,
  BRAKE,
  TURN_LEFT,
  TURN_RIGHT,
  FLAP,
  JUMP,
  JUMP_LEFT,
  JUMP_RIGHT,
  SLIDE,
  DASH,
};

using ActionSet = std::vector<Action>;

std::string_view to_string(GameId id);
std::string_view to_string(Perspective p);
std::string_view to_string(Action a);

std::optional<GameId> parse_game_id(std::string_view text);
std::optional<Perspective> parse_perspective(std::string_view text);
// Exact, case-sensitive match against the uppercase token names.
std::optional<Action> parse_action(std::string_view text);

inline bool contains(std::span<const Action> alphabet, Action a) {
  for (Action x : alphabet)
    if (x == a) return true;
  return false;
}

std::vector<std::string> action_names(std::span<const Action> alphabet);

// Integer axis-aligned rectangle, half-open: [x, x + w) × [y, y + h).
struct Rect {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t w = 0;
  std::int64_t h = 0;

  constexpr std::int64_t right() const { return x + w; }
  constexpr std::int64_t bottom() const { return y + h; }
  constexpr bool overlaps(const Rect& o) const {
    return x < o.right() && o.x < right() && y < o.bottom() && o.y < bottom();
  }
  constexpr bool contains(const Rect& o) const {
    return o.x >= x && o.y >= y && o.right() <= right() && o.bottom() <= bottom();
  }
  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

}  // namespace pixelbench
