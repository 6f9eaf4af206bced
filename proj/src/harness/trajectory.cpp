#include "pixelbench/harness/trajectory.hpp"

#include <fstream>

#include <fmt/format.h>

#include "pixelbench/agent/agent.hpp"
#include "pixelbench/core/errors.hpp"
#include "pixelbench/engine/png.hpp"
#include "pixelbench/games/catalog.hpp"

namespace pixelbench::harness {
namespace {

Action action_from_json(const nlohmann::json& j) {
  const auto a = parse_action(j.get<std::string>());
  if (!a) throw ConfigError(fmt::format("unknown action token {}", j.dump()));
  return *a;
}

nlohmann::json step_to_json(const StepEntry& s) {
  nlohmann::json j = {
      {"step_index", s.step_index},
      {"frame_file", s.frame_file},
      {"frame_sha256", s.frame_sha256},
      {"prompt_transcript", s.prompt_transcript},
      {"prompt_images", s.prompt_images},
      {"raw_reply", s.raw_reply},
      {"action_text", s.action_text},
      {"parsed_action", nullptr},
      {"executed", to_string(s.executed)},
      {"valid", s.valid},
      {"info", s.info},
      {"score", s.score},
      {"done", s.done},
  };
  if (s.parsed_action) j["parsed_action"] = to_string(*s.parsed_action);
  return j;
}

StepEntry step_from_json(const nlohmann::json& j) {
  StepEntry s;
  s.step_index = j.at("step_index").get<std::int64_t>();
  s.frame_file = j.at("frame_file").get<std::string>();
  s.frame_sha256 = j.at("frame_sha256").get<std::string>();
  s.prompt_transcript = j.at("prompt_transcript").get<std::string>();
  s.prompt_images = j.at("prompt_images").get<std::size_t>();
  s.raw_reply = j.at("raw_reply").get<std::string>();
  s.action_text = j.at("action_text").get<std::string>();
  if (!j.at("parsed_action").is_null()) s.parsed_action = action_from_json(j.at("parsed_action"));
  s.executed = action_from_json(j.at("executed"));
  s.valid = j.at("valid").get<bool>();
  s.info = j.at("info").get<std::string>();
  s.score = j.at("score").get<double>();
  s.done = j.at("done").get<bool>();
  return s;
}

std::string describe(const std::optional<Action>& a) { return a ? std::string(to_string(*a)) : "INVALID"; }

}  // namespace

nlohmann::json episode_to_json(const EpisodeRecord& e) {
  nlohmann::json steps = nlohmann::json::array();
  for (const StepEntry& s : e.steps) steps.push_back(step_to_json(s));
  return {
      {"schema_version", kTrajectorySchemaVersion},
      {"model", e.model},
      {"backend", e.backend},
      {"game", e.game},
      {"level", e.level},
      {"round", e.round},
      {"session_seed", e.session_seed},
      {"max_steps", e.max_steps},
      {"final_score", e.final_score},
      {"final_frame_sha256", e.final_frame_sha256},
      {"valid_actions", e.valid_actions},
      {"total_actions", e.total_actions},
      {"valid_rate", e.valid_rate},
      {"aborted", e.aborted},
      {"abort_reason", e.abort_reason},
      {"duration_ms", e.duration_ms},
      {"participant", e.participant},
      {"steps", steps},
  };
}

EpisodeRecord episode_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kTrajectorySchemaVersion)
      throw ConfigError(fmt::format("unsupported trajectory schema_version {}", j.at("schema_version").dump()));
    EpisodeRecord e;
    e.model = j.at("model").get<std::string>();
    e.backend = j.at("backend").get<std::string>();
    e.game = j.at("game").get<std::string>();
    e.level = j.at("level").get<std::string>();
    e.round = j.at("round").get<std::int64_t>();
    e.session_seed = j.at("session_seed").get<std::uint64_t>();
    e.max_steps = j.at("max_steps").get<int>();
    e.final_score = j.at("final_score").get<double>();
    e.final_frame_sha256 = j.at("final_frame_sha256").get<std::string>();
    e.valid_actions = j.at("valid_actions").get<std::int64_t>();
    e.total_actions = j.at("total_actions").get<std::int64_t>();
    e.valid_rate = j.at("valid_rate").get<double>();
    e.aborted = j.at("aborted").get<bool>();
    e.abort_reason = j.at("abort_reason").get<std::string>();
    e.duration_ms = j.at("duration_ms").get<std::int64_t>();
    e.participant = j.at("participant").get<std::string>();
    for (const auto& s : j.at("steps")) e.steps.push_back(step_from_json(s));
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(fmt::format("malformed episode record: {}", ex.what()));
  }
}

void TrajectoryWriter::append(const EpisodeRecord& e) {
  const std::string line = episode_to_json(e).dump() + "\n";
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot append to trajectory file {}", path_.string()));
  out << line;
  out.flush();
}

std::vector<EpisodeRecord> read_trajectories(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read trajectory file {}", path.string()));
  std::vector<EpisodeRecord> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      out.push_back(episode_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(fmt::format("{}:{}: {}", path.string(), number, e.what()));
    }
  }
  return out;
}

void write_trajectories(const std::filesystem::path& path, const std::vector<EpisodeRecord>& episodes) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write trajectory file {}", path.string()));
  for (const EpisodeRecord& e : episodes) out << episode_to_json(e).dump() << '\n';
}

ReplayOutcome verify_episode(const EpisodeRecord& e, const ReplayOptions& options) {
  ReplayOutcome out;
  auto fail = [&](std::int64_t step, std::string message) {
    out.ok = false;
    out.divergent_step = step;
    out.message = fmt::format("step {}: {}", step, message);
    return out;
  };

  GameSession session = games::create_session(e.level, SessionSeed{e.session_seed});
  if (options.frame_dump) std::filesystem::create_directories(*options.frame_dump);
  const std::int64_t valid_count = std::count_if(e.steps.begin(), e.steps.end(), [](const StepEntry& s) { return s.valid; });
  if (valid_count != e.valid_actions || static_cast<std::int64_t>(e.steps.size()) != e.total_actions) {
    out.ok = false;
    out.message = fmt::format("validity counts {}/{} do not match the {} recorded steps ({} valid)", e.valid_actions,
                              e.total_actions, e.steps.size(), valid_count);
    return out;
  }

  for (std::size_t i = 0; i < e.steps.size(); ++i) {
    const StepEntry& s = e.steps[i];
    const auto index = static_cast<std::int64_t>(i);
    if (session.done()) return fail(index, "the replayed episode already ended");
    if (s.step_index != session.step_index())
      return fail(index, fmt::format("recorded step_index {} but the engine is at {}", s.step_index,
                                     session.step_index()));
    const Frame frame = session.render();
    if (options.frame_dump) write_png(*options.frame_dump / fmt::format("step_{:04}.png", i), frame);
    if (frame.hash() != s.frame_sha256) return fail(index, "frame hash differs from the recording");
    if (options.check_replies) {
      const agent::ParsedResponse parsed = agent::parse_response(s.raw_reply, session.alphabet());
      if (parsed.action != s.parsed_action)
        return fail(index, fmt::format("reply parses to {} but the recording says {}", describe(parsed.action),
                                       describe(s.parsed_action)));
    }
    if (s.valid != s.parsed_action.has_value()) return fail(index, "validity flag disagrees with the parsed action");
    const Action expected = s.parsed_action.value_or(Action::NONE);
    if (s.executed != expected)
      return fail(index, fmt::format("executed {} but the reply chose {}", to_string(s.executed), to_string(expected)));
    if (!contains(session.alphabet(), s.executed))
      return fail(index, fmt::format("{} is outside the level's alphabet", to_string(s.executed)));
    const StepResult result = session.step(s.executed);
    if (result.score != s.score)
      return fail(index, fmt::format("score {} after the step, recorded {}", result.score, s.score));
    if (result.done != s.done) return fail(index, fmt::format("done={} after the step, recorded {}", result.done, s.done));
    if (result.info != s.info) return fail(index, fmt::format("info \"{}\", recorded \"{}\"", result.info, s.info));
  }

  const Frame last = session.render();
  if (options.frame_dump) write_png(*options.frame_dump / fmt::format("step_{:04}.png", e.steps.size()), last);
  out.replayed_score = static_cast<double>(session.score());
  const auto end = static_cast<std::int64_t>(e.steps.size());
  if (!e.final_frame_sha256.empty() && last.hash() != e.final_frame_sha256)
    return fail(end, "final frame hash differs from the recording");
  if (e.aborted) {
    if (e.final_score != 0.0) return fail(end, "an aborted episode must score 0");
    return out;
  }
  if (!session.done()) return fail(end, "the recording ends before the episode does");
  if (out.replayed_score != e.final_score)
    return fail(end, fmt::format("final score {} replayed, recorded {}", out.replayed_score, e.final_score));
  return out;
}

}  // namespace pixelbench::harness
