#include "pixelbench/harness/baseline.hpp"

#include <fstream>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "pixelbench/core/errors.hpp"

namespace pixelbench::harness {

HumanBaseline make_baseline(const LevelSpec& level, std::vector<std::string> participants, std::vector<double> scores) {
  if (scores.empty()) throw StateError(fmt::format("no completed human episodes on {}", level.key));
  if (participants.size() != scores.size()) throw ContractError("one participant name per score is required");
  HumanBaseline b;
  b.game = std::string(to_string(level.game));
  b.level = level.key;
  b.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
  b.participants = std::move(participants);
  b.scores = std::move(scores);
  return b;
}

HumanBaseline collect_human_baseline(const std::vector<EpisodeRecord>& episodes, const LevelSpec& level,
                                     int participants) {
  if (participants < 1) throw ContractError("a baseline needs at least one participant");
  std::map<std::string, double> latest;
  std::vector<std::string> order;
  for (const EpisodeRecord& e : episodes) {
    if (e.backend != "human" || e.level != level.key || e.aborted) continue;
    if (e.steps.empty() || !e.steps.back().done) continue;
    if (!latest.contains(e.participant)) order.push_back(e.participant);
    latest[e.participant] = e.final_score;
  }
  if (static_cast<int>(order.size()) < participants)
    throw StateError(fmt::format("{} of {} participants have completed {}", order.size(), participants, level.key));
  order.resize(static_cast<std::size_t>(participants));
  std::vector<double> scores;
  for (const auto& name : order) scores.push_back(latest.at(name));
  return make_baseline(level, order, scores);
}

nlohmann::json baseline_to_json(const HumanBaseline& b) {
  return {{"game", b.game}, {"level", b.level}, {"participants", b.participants}, {"scores", b.scores}, {"mean", b.mean}};
}

HumanBaseline baseline_from_json(const nlohmann::json& j) {
  try {
    HumanBaseline b;
    b.game = j.at("game").get<std::string>();
    b.level = j.at("level").get<std::string>();
    b.participants = j.at("participants").get<std::vector<std::string>>();
    b.scores = j.at("scores").get<std::vector<double>>();
    b.mean = j.at("mean").get<double>();
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("malformed baseline: {}", e.what()));
  }
}

void store_baseline(const std::filesystem::path& path, const HumanBaseline& b) {
  nlohmann::json all = nlohmann::json::object();
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    all = nlohmann::json::parse(in);
  }
  all[b.level] = baseline_to_json(b);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
  out << all.dump(2) << '\n';
}

std::vector<HumanBaseline> load_baselines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read {}", path.string()));
  const nlohmann::json all = nlohmann::json::parse(in);
  std::vector<HumanBaseline> out;
  for (const auto& [key, value] : all.items()) out.push_back(baseline_from_json(value));
  return out;
}

}  // namespace pixelbench::harness
