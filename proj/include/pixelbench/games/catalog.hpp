#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pixelbench/engine/game.hpp"
#include "pixelbench/engine/level.hpp"

namespace pixelbench::games {

// Declared difficulty_params keys for one game. `optional` keys may be
// omitted; anything outside both lists is rejected.
struct ParamSchema {
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

const ParamSchema& param_schema(GameId game);

// Levels loaded from one JSON document per game. Keys are unique across the
// registry; order is document order, games in declaration order.
class LevelRegistry {
 public:
  // (document name, JSON text) pairs. Throws ConfigError on any schema or
  // invariant violation.
  static LevelRegistry from_documents(const std::vector<std::pair<std::string, std::string>>& docs);
  static LevelRegistry load_directory(const std::filesystem::path& dir);
  // The registry compiled into the library from config/levels.
  static const LevelRegistry& builtin();

  const std::vector<LevelSpec>& levels() const { return levels_; }
  // Throws ConfigError for an unregistered key.
  const LevelSpec& get(std::string_view key) const;
  const LevelSpec* find(std::string_view key) const;
  std::vector<const LevelSpec*> for_game(GameId game) const;

 private:
  std::vector<LevelSpec> levels_;
};

// Parses and validates one level document; exposed for config tooling.
std::vector<LevelSpec> parse_level_document(std::string_view json_text, std::string_view origin);

// All shipped levels, in catalog order.
std::vector<LevelSpec> level_catalog();

// Throws ConfigError when `key` is not registered.
GameSession create_session(std::string_view key, SessionSeed seed);
// Unregistered specs are accepted as long as they satisfy the game schema.
GameSession create_session(const LevelSpec& level, SessionSeed seed);

}  // namespace pixelbench::games
