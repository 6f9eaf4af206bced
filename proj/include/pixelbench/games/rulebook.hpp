#pragma once

#include <string>

#include "pixelbench/engine/level.hpp"

namespace pixelbench::games {

// Per-game prompt material. The same text is exported by `catalog --rules`.
struct Rulebook {
  std::string rules;              // opening description of the game and goal
  std::string notes;              // numbered hints shown after the current frame
  std::string observation_hint;   // what the Observation section should cover
  std::string action_hint;        // the Action section's instruction
};

Rulebook rulebook_for(const LevelSpec& level);

// Plain-text document for one level: rules, notes, and the alphabet.
std::string rulebook_document(const LevelSpec& level);

// "one", "two", ... "ten"; digits beyond that.
std::string number_word(long n);

}  // namespace pixelbench::games
