#include "pixelbench/harness/config.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

#include "pixelbench/core/errors.hpp"
#include "pixelbench/games/catalog.hpp"

namespace pixelbench::harness {
namespace {

std::vector<std::string> string_list(const nlohmann::json& j, const char* field) {
  if (!j.is_array()) throw ConfigError(fmt::format("config field {} must be an array of strings", field));
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) throw ConfigError(fmt::format("config field {} must be an array of strings", field));
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

EvaluationConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("evaluation config must be a JSON object");
  static const std::set<std::string> known = {"schema_version", "models",      "games",        "levels",
                                              "rounds",         "master_seed", "max_parallel_pairs",
                                              "max_remote_requests", "output_dir", "admit_oracles",
                                              "save_frames",    "stabilization"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError(fmt::format("unknown config field '{}'", key));

  EvaluationConfig cfg;
  try {
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != kConfigSchemaVersion)
      throw ConfigError(fmt::format("unsupported config schema_version {}", j.at("schema_version").dump()));
    if (!j.contains("models") || !j.at("models").is_array()) throw ConfigError("config needs a models array");
    std::set<std::string> names;
    for (const auto& p : j.at("models")) {
      models::ModelProfile profile = models::profile_from_json(p);
      if (!names.insert(profile.name).second) throw ConfigError(fmt::format("duplicate model name '{}'", profile.name));
      cfg.models.push_back(std::move(profile));
    }
    if (j.contains("games")) cfg.games = string_list(j.at("games"), "games");
    if (j.contains("levels")) cfg.levels = string_list(j.at("levels"), "levels");
    if (j.contains("rounds")) cfg.rounds = j.at("rounds").get<int>();
    if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("max_parallel_pairs")) cfg.max_parallel_pairs = j.at("max_parallel_pairs").get<int>();
    if (j.contains("max_remote_requests")) cfg.max_remote_requests = j.at("max_remote_requests").get<int>();
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("admit_oracles")) cfg.admit_oracles = j.at("admit_oracles").get<bool>();
    if (j.contains("save_frames")) cfg.save_frames = j.at("save_frames").get<bool>();
    if (j.contains("stabilization")) {
      const auto& s = j.at("stabilization");
      for (const auto& [key, value] : s.items())
        if (key != "passes" && key != "k_factor" && key != "seed")
          throw ConfigError(fmt::format("unknown stabilization field '{}'", key));
      if (s.contains("passes")) cfg.stabilization.passes = s.at("passes").get<std::int64_t>();
      if (s.contains("k_factor")) cfg.stabilization.k_factor = s.at("k_factor").get<double>();
      if (s.contains("seed")) cfg.stabilization.shuffle_seed = s.at("seed").get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("malformed evaluation config: {}", e.what()));
  }
  if (cfg.rounds < 1) throw ConfigError("rounds must be at least 1");
  if (cfg.max_parallel_pairs < 1) throw ConfigError("max_parallel_pairs must be at least 1");
  if (cfg.max_remote_requests < 1) throw ConfigError("max_remote_requests must be at least 1");
  if (cfg.stabilization.passes < 1) throw ConfigError("stabilization passes must be at least 1");
  if (!(cfg.stabilization.k_factor > 0.0)) throw ConfigError("stabilization k_factor must be positive");
  return cfg;
}

nlohmann::json config_to_json(const EvaluationConfig& cfg) {
  nlohmann::json profiles = nlohmann::json::array();
  for (const auto& p : cfg.models) profiles.push_back(models::profile_to_json(p));
  return {
      {"schema_version", kConfigSchemaVersion},
      {"models", profiles},
      {"games", cfg.games},
      {"levels", cfg.levels},
      {"rounds", cfg.rounds},
      {"master_seed", cfg.master_seed},
      {"max_parallel_pairs", cfg.max_parallel_pairs},
      {"max_remote_requests", cfg.max_remote_requests},
      {"output_dir", cfg.output_dir.string()},
      {"admit_oracles", cfg.admit_oracles},
      {"save_frames", cfg.save_frames},
      {"stabilization",
       {{"passes", cfg.stabilization.passes},
        {"k_factor", cfg.stabilization.k_factor},
        {"seed", cfg.stabilization.shuffle_seed}}},
  };
}

EvaluationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file {}", path.string()));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return config_from_json(j);
}

std::vector<LevelSpec> selected_levels(const EvaluationConfig& cfg) {
  const auto& registry = games::LevelRegistry::builtin();
  std::vector<LevelSpec> out;
  if (!cfg.levels.empty()) {
    std::set<std::string> wanted(cfg.levels.begin(), cfg.levels.end());
    for (const auto& key : wanted) registry.get(key);
    for (const LevelSpec& level : registry.levels())
      if (wanted.contains(level.key)) out.push_back(level);
    return out;
  }
  std::set<GameId> games;
  for (const auto& name : cfg.games) {
    const auto id = parse_game_id(name);
    if (!id) throw ConfigError(fmt::format("unknown game '{}'", name));
    games.insert(*id);
  }
  for (const LevelSpec& level : registry.levels())
    if (games.empty() || games.contains(level.game)) out.push_back(level);
  if (out.empty()) throw ConfigError("the config selects no levels");
  return out;
}

void validate_for_ranking(const EvaluationConfig& cfg) {
  if (cfg.models.size() < 2) throw ConfigError("a ranked run needs at least two models");
  if (cfg.rounds < 1) throw ConfigError("rounds must be at least 1");
  for (const auto& p : cfg.models) {
    if (p.kind == models::BackendKind::oracle && !cfg.admit_oracles)
      throw ConfigError(fmt::format("model '{}' is a scripted oracle; set admit_oracles to rank it", p.name));
    if (p.kind == models::BackendKind::human)
      throw ConfigError(fmt::format("model '{}' is a human relay; collect human scores with the baseline command",
                                    p.name));
  }
}

}  // namespace pixelbench::harness
