#include "pixelbench/engine/types.hpp"

#include <array>
#include <utility>

namespace pixelbench {
namespace {

constexpr std::array<std::pair<GameId, std::string_view>, 5> kGames{{
    {GameId::race, "race"},
    {GameId::flappybird, "flappybird"},
    {GameId::pong, "pong"},
    {GameId::supermario, "supermario"},
    {GameId::tempestrun, "tempestrun"},
}};

constexpr std::array<std::pair<Perspective, std::string_view>, 4> kPerspectives{{
    {Perspective::map_view, "map_view"},
    {Perspective::first_person, "first_person"},
    {Perspective::side_scroll, "side_scroll"},
    {Perspective::tunnel, "tunnel"},
}};

constexpr std::array<std::pair<Action, std::string_view>, 15> kActions{{
    {Action::NONE, "NONE"},
    {Action::UP, "UP"},
    {Action::DOWN, "DOWN"},
    {Action::LEFT, "LEFT"},
    {Action::RIGHT, "RIGHT"},
    {Action::ACCELERATE, "ACCELERATE"},
    {Action::BRAKE, "BRAKE"},
    {Action::TURN_LEFT, "TURN_LEFT"},
    {Action::TURN_RIGHT, "TURN_RIGHT"},
    {Action::FLAP, "FLAP"},
    {Action::JUMP, "JUMP"},
    {Action::JUMP_LEFT, "JUMP_LEFT"},
    {Action::JUMP_RIGHT, "JUMP_RIGHT"},
    {Action::SLIDE, "SLIDE"},
    {Action::DASH, "DASH"},
}};

template <typename Table, typename Key>
std::string_view name_of(const Table& table, Key key) {
  for (const auto& [k, name] : table)
    if (k == key) return name;
  return "?";
}

template <typename Key, typename Table>
std::optional<Key> key_of(const Table& table, std::string_view text) {
  for (const auto& [k, name] : table)
    if (name == text) return k;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(GameId id) { return name_of(kGames, id); }
std::string_view to_string(Perspective p) { return name_of(kPerspectives, p); }
std::string_view to_string(Action a) { return name_of(kActions, a); }

std::optional<GameId> parse_game_id(std::string_view text) { return key_of<GameId>(kGames, text); }
std::optional<Perspective> parse_perspective(std::string_view text) {
  return key_of<Perspective>(kPerspectives, text);
}
std::optional<Action> parse_action(std::string_view text) { return key_of<Action>(kActions, text); }

std::vector<std::string> action_names(std::span<const Action> alphabet) {
  std::vector<std::string> out;
  out.reserve(alphabet.size());
  for (Action a : alphabet) out.emplace_back(to_string(a));
  return out;
}

}  // namespace pixelbench
