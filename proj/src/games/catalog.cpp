#include "pixelbench/games/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "pixelbench/core/errors.hpp"
#include "pixelbench/games/flappy.hpp"
#include "pixelbench/games/mario.hpp"
#include "pixelbench/games/pong.hpp"
#include "pixelbench/games/race.hpp"
#include "pixelbench/games/tempest.hpp"

namespace pixelbench::games {
namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

const std::vector<std::pair<std::string, std::string>>& embedded_documents() {
  static const std::vector<std::pair<std::string, std::string>> docs = {
#include "pixelbench/embedded_levels.inc"
  };
  return docs;
}

void require_keys_subset(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
  for (const auto& [k, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError(fmt::format("{}: unknown key '{}'", where, k));
  }
}

Rect parse_rect(const json& j, std::string_view where) {
  if (!j.is_array() || j.size() != 4) throw ConfigError(fmt::format("{}: rectangles are [x, y, w, h]", where));
  Rect r{j[0].get<std::int64_t>(), j[1].get<std::int64_t>(), j[2].get<std::int64_t>(), j[3].get<std::int64_t>()};
  if (r.w <= 0 || r.h <= 0) throw ConfigError(fmt::format("{}: rectangle with non-positive size", where));
  return r;
}

std::vector<Action> parse_tape(const std::string& text, std::string_view where) {
  std::vector<Action> tape;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    auto a = parse_action(token);
    if (!a) throw ConfigError(fmt::format("{}: unknown tape action '{}'", where, token));
    tape.push_back(*a);
  }
  return tape;
}

void validate_params(const LevelSpec& level, std::string_view where) {
  const ParamSchema& schema = param_schema(level.game);
  for (const auto& [name, _] : level.params) {
    const bool known = std::find(schema.required.begin(), schema.required.end(), name) != schema.required.end() ||
                       std::find(schema.optional.begin(), schema.optional.end(), name) != schema.optional.end();
    if (!known) throw ConfigError(fmt::format("{}: unknown difficulty parameter '{}'", where, name));
  }
  for (const auto& name : schema.required)
    if (!level.params.contains(name)) throw ConfigError(fmt::format("{}: missing difficulty parameter '{}'", where, name));
  if (level.game == GameId::race && level.perspective == Perspective::first_person) {
    for (const auto& name : schema.optional)
      if (!level.params.contains(name))
        throw ConfigError(fmt::format("{}: first-person race levels need '{}'", where, name));
  }
}

void validate_level(const LevelSpec& level, std::string_view where) {
  if (level.max_steps < 1) throw ConfigError(fmt::format("{}: max_steps must be >= 1", where));
  if (!(level.human_max_score > 0)) throw ConfigError(fmt::format("{}: human_max_score must be > 0", where));
  if (level.history_frames < 0) throw ConfigError(fmt::format("{}: history_frames must be >= 0", where));
  if (level.level_index < 0) throw ConfigError(fmt::format("{}: level_index must be non-negative", where));
  validate_params(level, where);
  if (level.game == GameId::supermario && !level.geometry.goal_x)
    throw ConfigError(fmt::format("{}: platformer levels need geometry.goal_x", where));
}

LevelSpec parse_level(const json& j, GameId game, std::string_view origin) {
  const std::string where = fmt::format("{} level {}", origin, j.value("key", std::string("?")));
  require_keys_subset(j,
                      {"key", "name", "level_index", "perspective", "max_steps", "history_frames", "human_max_score",
                       "params", "geometry"},
                      where);
  LevelSpec level;
  try {
    level.key = j.at("key").get<std::string>();
    level.name = j.at("name").get<std::string>();
    level.game = game;
    level.level_index = j.at("level_index").get<int>();
    const auto perspective = parse_perspective(j.at("perspective").get<std::string>());
    if (!perspective) throw ConfigError(where + ": unknown perspective");
    level.perspective = *perspective;
    level.max_steps = j.at("max_steps").get<int>();
    level.history_frames = j.at("history_frames").get<int>();
    level.human_max_score = j.at("human_max_score").get<double>();
    for (const auto& [name, value] : j.at("params").items()) {
      if (!value.is_number_integer()) throw ConfigError(fmt::format("{}: parameter '{}' must be an integer", where, name));
      level.params[name] = value.get<std::int64_t>();
    }
    if (j.contains("geometry")) {
      const json& g = j["geometry"];
      require_keys_subset(g, {"solids", "hazards", "goal_x", "oracle_tape"}, where + " geometry");
      for (const auto& r : g.value("solids", json::array())) level.geometry.solids.push_back(parse_rect(r, where));
      for (const auto& r : g.value("hazards", json::array())) level.geometry.hazards.push_back(parse_rect(r, where));
      if (g.contains("goal_x")) level.geometry.goal_x = g["goal_x"].get<std::int64_t>();
      if (g.contains("oracle_tape")) level.geometry.oracle_tape = parse_tape(g["oracle_tape"].get<std::string>(), where);
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", where, e.what()));
  }
  validate_level(level, where);
  return level;
}

}  // namespace

const ParamSchema& param_schema(GameId game) {
  static const ParamSchema race{{"stride_px", "car_px", "min_path_steps", "max_path_steps"},
                                {"speed_unit_px", "max_speed", "view_radius_px"}};
  static const ParamSchema flappy{{"pipe_gap_px", "forward_speed_px", "pipe_spacing_px", "pipe_width_px",
                                   "first_pipe_x", "max_gap_shift_px", "score_cap"},
                                  {}};
  static const ParamSchema pong{{"paddle_height_px", "paddle_stride_px", "ball_speed_x", "ball_speed_y_max", "score_cap"},
                                {}};
  static const ParamSchema mario{{"stride_px", "jump_velocity", "gravity", "max_fall_speed"}, {}};
  static const ParamSchema tempest{{"lane_count", "barrier_spawn_interval_steps", "view_depth_slots",
                                    "track_length_slots", "first_barrier_slot", "score_per_slot"},
                                   {}};
  switch (game) {
    case GameId::race: return race;
    case GameId::flappybird: return flappy;
    case GameId::pong: return pong;
    case GameId::supermario: return mario;
    case GameId::tempestrun: return tempest;
  }
  return race;
}

std::vector<LevelSpec> parse_level_document(std::string_view json_text, std::string_view origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", origin, e.what()));
  }
  require_keys_subset(doc, {"schema_version", "game", "levels"}, origin);
  if (doc.value("schema_version", 0) != kSchemaVersion)
    throw ConfigError(fmt::format("{}: unsupported schema_version", origin));
  const auto game = parse_game_id(doc.value("game", std::string()));
  if (!game) throw ConfigError(fmt::format("{}: unknown game", origin));
  std::vector<LevelSpec> out;
  for (const auto& j : doc.at("levels")) out.push_back(parse_level(j, *game, origin));
  return out;
}

LevelRegistry LevelRegistry::from_documents(const std::vector<std::pair<std::string, std::string>>& docs) {
  std::vector<LevelSpec> all;
  for (const auto& [name, text] : docs) {
    auto levels = parse_level_document(text, name);
    all.insert(all.end(), std::make_move_iterator(levels.begin()), std::make_move_iterator(levels.end()));
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const LevelSpec& a, const LevelSpec& b) { return static_cast<int>(a.game) < static_cast<int>(b.game); });
  std::set<std::string> seen;
  for (const auto& l : all)
    if (!seen.insert(l.key).second) throw ConfigError(fmt::format("duplicate level key '{}'", l.key));
  LevelRegistry reg;
  reg.levels_ = std::move(all);
  return reg;
}

LevelRegistry LevelRegistry::load_directory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) throw ConfigError(fmt::format("{} is not a directory", dir.string()));
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<std::pair<std::string, std::string>> docs;
  for (const auto& f : files) {
    std::ifstream in(f);
    std::stringstream ss;
    ss << in.rdbuf();
    docs.emplace_back(f.filename().string(), ss.str());
  }
  return from_documents(docs);
}

const LevelRegistry& LevelRegistry::builtin() {
  static const LevelRegistry reg = from_documents(embedded_documents());
  return reg;
}

const LevelSpec* LevelRegistry::find(std::string_view key) const {
  for (const auto& l : levels_)
    if (l.key == key) return &l;
  return nullptr;
}

const LevelSpec& LevelRegistry::get(std::string_view key) const {
  if (const LevelSpec* l = find(key)) return *l;
  throw ConfigError(fmt::format("unknown level '{}'", key));
}

std::vector<const LevelSpec*> LevelRegistry::for_game(GameId game) const {
  std::vector<const LevelSpec*> out;
  for (const auto& l : levels_)
    if (l.game == game) out.push_back(&l);
  return out;
}

std::vector<LevelSpec> level_catalog() { return LevelRegistry::builtin().levels(); }

GameSession create_session(std::string_view key, SessionSeed seed) {
  return create_session(LevelRegistry::builtin().get(key), seed);
}

GameSession create_session(const LevelSpec& level, SessionSeed seed) {
  validate_level(level, level.key);
  std::unique_ptr<Game> game;
  switch (level.game) {
    case GameId::race: game = std::make_unique<RaceGame>(level, seed); break;
    case GameId::flappybird: game = std::make_unique<FlappyGame>(level, seed); break;
    case GameId::pong: game = std::make_unique<PongGame>(level, seed); break;
    case GameId::supermario: game = std::make_unique<MarioGame>(level, seed); break;
    case GameId::tempestrun: game = std::make_unique<TempestGame>(level, seed); break;
  }
  return GameSession(level, seed, std::move(game));
}

}  // namespace pixelbench::games
