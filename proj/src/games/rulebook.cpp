#include "pixelbench/games/rulebook.hpp"

#include <fmt/format.h>

#include "pixelbench/games/catalog.hpp"

namespace pixelbench::games {
namespace {

std::string action_list(const LevelSpec& level) {
  auto session = create_session(level, SessionSeed{0});
  std::string out;
  for (Action a : session.alphabet()) {
    if (!out.empty()) out += ", ";
    out += to_string(a);
  }
  return out;
}

std::size_t alphabet_size(const LevelSpec& level) { return create_session(level, SessionSeed{0}).alphabet().size(); }

}  // namespace

std::string number_word(long n) {
  static const char* const kWords[] = {"zero", "one", "two", "three", "four", "five",
                                       "six",  "seven", "eight", "nine", "ten"};
  if (n >= 0 && n <= 10) return kWords[n];
  return std::to_string(n);
}

Rulebook rulebook_for(const LevelSpec& level) {
  Rulebook book;
  const std::string actions = action_list(level);
  const std::string count = number_word(static_cast<long>(alphabet_size(level)));
  switch (level.game) {
    case GameId::race:
      if (level.perspective == Perspective::first_person) {
        book.rules =
            "Assume you are playing a PC game called 'Race'.\n\n"
            "You are driving a red car seen from behind: the view is centered on the car and rotates with it, so "
            "the top of the screen is always the direction the car is facing. Only the area near the car is "
            "visible. Your goal is to reach the golden trophy. Brown blocks and the dark arena border are walls; "
            "touching them crashes the car and ends the game.\n\n"
            "ACCELERATE increases forward speed, BRAKE decreases it (and can reverse slowly), TURN_LEFT and "
            "TURN_RIGHT rotate the car by 45 degrees. The car keeps moving at its current speed every step, so "
            "plan turns and braking ahead of time. The current speed is shown at the top left.";
        book.notes =
            "1. Compare the frames to estimate how fast the car is moving and where it is heading.\n"
            "2. Slow down before turning near walls.";
      } else {
        book.rules =
            "Assume you are playing a PC game called 'Race'.\n\n"
            "The screen shows the whole track from above. You control the red car and must move it onto the "
            "golden trophy. Brown blocks are obstacles and the track border cannot be crossed; moving into them "
            "leaves the car where it is.\n\n"
            "Each action moves the car one fixed step in the given screen direction: UP, DOWN, LEFT or RIGHT. "
            "NONE keeps the car still.";
        book.notes =
            "1. Compare the position of the car with the position of the trophy before choosing a direction.\n"
            "2. Go around obstacles instead of pushing into them.";
      }
      book.observation_hint = "Describe the positions of the car, the trophy, and nearby obstacles.";
      break;
    case GameId::flappybird:
      book.rules =
          "Assume you are playing a PC game called 'Flappy Bird'.\n\n"
          "You control the yellow bird on the left of the screen. The world scrolls to the left at a constant "
          "speed, bringing green pipes toward the bird. Fly through the gap in every pair of pipes. Touching a "
          "pipe, the ground, or the top of the screen ends the game. You score one point for each pipe passed.\n\n"
          "FLAP gives the bird a fixed upward push. With NONE the bird falls, faster every step it does not flap.";
      book.notes =
          "1. Use the previous frames to judge whether the bird is rising or falling.\n"
          "2. Line the bird up with the gap of the next pipe before it arrives.";
      book.observation_hint = "Describe the bird's height, its motion, and the gap of the next pipe.";
      break;
    case GameId::pong:
      book.rules =
          "Assume you are playing a PC game called 'Pong'.\n\n"
          "You control the white paddle on the left edge of the court. The ball bounces off the top and bottom "
          "of the court and off the right wall. Keep the ball from passing your paddle: each return scores one "
          "point, and the game ends when the ball gets past the paddle.\n\n"
          "UP and DOWN move the paddle by a fixed amount; NONE keeps it in place.";
      book.notes =
          "1. Use the previous frames to work out the direction the ball is traveling.\n"
          "2. Move the paddle to where the ball will reach the left edge, not where it is now.";
      book.observation_hint = "Describe the ball's position and direction and the paddle's position.";
      break;
    case GameId::supermario:
      book.rules =
          "Assume you are playing a PC game called 'Super Mario'.\n\n"
          "You control the red character in a side-scrolling level. Run to the right and reach the green flag. "
          "Falling into a pit or touching a magenta hazard ends the game. Brown blocks are solid ground and "
          "platforms you can stand on. Your score grows with the distance you reach toward the flag.\n\n"
          "LEFT and RIGHT walk, JUMP jumps straight up, JUMP_LEFT and JUMP_RIGHT jump while moving. Jumping only "
          "works while standing on something.";
      book.notes =
          "1. Start a jump early enough to clear the whole gap or obstacle.\n"
          "2. If an attempt failed before, try a different timing or path.";
      book.observation_hint = "Describe the character's position and the obstacles, pits, and hazards ahead.";
      break;
    case GameId::tempestrun:
      book.rules =
          "Assume you are playing a PC game called 'Tempest Run'.\n\n"
          "You need to control a character who moves through a three-dimensional space inside a futuristic "
          "tunnel filled with various obstacles and enemies. Your goal is to navigate through the tunnel, avoid "
          "or overcome obstacles, and run as far as possible. Avoid colliding with red spikes, purple walls, or "
          "failing to deal with green enemies.\n\n"
          "Use the optimal combination of movements to progress through the tunnel smoothly and efficiently. "
          "Monitor the character's position relative to obstacles and react appropriately to avoid losing "
          "progress.";
      book.notes =
          "1. Use JUMP to jump over red spikes on the ground.\n"
          "2. Use SLIDE to duck and kick green enemies to eliminate them.\n"
          "3. Use LEFT or RIGHT to change lanes around purple walls; the lanes wrap around.\n"
          "4. DASH moves two slots forward at once while running.";
      book.observation_hint = "Describe the character's current position and nearby obstacles or enemies.";
      break;
  }
  book.action_hint = fmt::format("Choose ONE of the {} actions to control the character: {}. Do NOT add any other words.",
                                 count, actions);
  return book;
}

std::string rulebook_document(const LevelSpec& level) {
  const Rulebook book = rulebook_for(level);
  return fmt::format("{} ({})\n\n{}\n\nImportant notes:\n{}\n\nActions: {}\n", level.name, level.key, book.rules,
                     book.notes, action_list(level));
}

}  // namespace pixelbench::games
