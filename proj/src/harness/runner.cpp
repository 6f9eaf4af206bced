#include "pixelbench/harness/runner.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "pixelbench/agent/agent.hpp"
#include "pixelbench/core/errors.hpp"
#include "pixelbench/core/rng.hpp"
#include "pixelbench/engine/png.hpp"
#include "pixelbench/games/catalog.hpp"
#include "pixelbench/models/remote.hpp"

namespace pixelbench::harness {
namespace {

std::string path_component(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += keep ? c : '_';
  }
  return out.empty() ? "_" : out;
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

using RoundKey = std::pair<std::string, std::int64_t>;

// Keeps the records of rounds that hold all `pairs_per_round` matches; a
// round cut short by a kill is dropped and rerun.
std::set<RoundKey> complete_rounds(const elo::ComparisonPool& pool, std::size_t pairs_per_round) {
  std::map<RoundKey, std::size_t> counts;
  for (const auto& m : pool) ++counts[{m.level, m.round}];
  std::set<RoundKey> out;
  for (const auto& [key, n] : counts)
    if (n == pairs_per_round) out.insert(key);
  return out;
}

// Reads a pool file written by a possibly interrupted run; a torn last line
// is ignored.
elo::ComparisonPool read_partial_pool(const std::filesystem::path& path, bool& torn) {
  elo::ComparisonPool pool;
  torn = false;
  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t start = 0;
  while (start < content.size()) {
    const std::size_t end = content.find('\n', start);
    if (end == std::string::npos) {
      torn = true;
      break;
    }
    const std::string line = content.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    pool.push_back(elo::match_from_json(nlohmann::json::parse(line)));
  }
  return pool;
}

std::vector<EpisodeRecord> read_partial_trajectories(const std::filesystem::path& path) {
  std::vector<EpisodeRecord> out;
  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t start = 0;
  while (start < content.size()) {
    const std::size_t end = content.find('\n', start);
    if (end == std::string::npos) break;
    const std::string line = content.substr(start, end - start);
    start = end + 1;
    if (!line.empty()) out.push_back(episode_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

nlohmann::json comparable_snapshot(const EvaluationConfig& cfg) {
  nlohmann::json j = config_to_json(cfg);
  // Neither changes what an already completed round contains.
  j.erase("output_dir");
  j.erase("rounds");
  return j;
}

}  // namespace

EpisodeRecord run_episode(const LevelSpec& level, SessionSeed seed, const models::ModelProfile& profile,
                          models::ModelBackend& backend, const EpisodeOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  GameSession session = games::create_session(level, seed);
  agent::Agent agent(agent::AgentConfig::for_level(level));

  EpisodeRecord rec;
  rec.model = profile.name;
  rec.backend = std::string(models::to_string(profile.kind));
  rec.game = std::string(to_string(level.game));
  rec.level = level.key;
  rec.round = options.round;
  rec.session_seed = seed.value;
  rec.max_steps = level.max_steps;
  rec.participant = options.participant;

  std::filesystem::path frame_rel;
  if (options.run_dir) {
    frame_rel = std::filesystem::path(kFrameDir) / path_component(level.key) / fmt::format("round_{:04}", options.round) /
                path_component(options.participant.empty() ? profile.name : profile.name + "-" + options.participant);
    std::filesystem::create_directories(*options.run_dir / frame_rel);
  }
  if (options.observer) {
    const StepResult now = session.current();
    options.observer({session.step_index(), encode_png(now.frame), now.score, now.done, now.info});
  }

  std::string last_hash;
  while (!session.done()) {
    agent::Agent::Turn turn;
    try {
      turn = agent.act(session, backend);
    } catch (const TransportError& e) {
      rec.aborted = true;
      rec.abort_reason = e.what();
    } catch (const ProtocolError& e) {
      rec.aborted = true;
      rec.abort_reason = e.what();
    }
    if (rec.aborted) {
      spdlog::warn("{} aborted on {} at step {}: {}", profile.name, level.key, session.step_index(), rec.abort_reason);
      break;
    }
    StepEntry s;
    s.step_index = turn.step_index;
    s.frame_sha256 = turn.frame_hash;
    if (options.run_dir) {
      const auto rel = frame_rel / fmt::format("step_{:04}.png", turn.step_index);
      write_bytes(*options.run_dir / rel, turn.frame_png);
      s.frame_file = rel.generic_string();
    }
    s.prompt_transcript = std::move(turn.prompt_transcript);
    s.prompt_images = turn.prompt_images;
    s.raw_reply = turn.reply.text;
    s.action_text = turn.parsed.action_text;
    s.parsed_action = turn.parsed.action;
    s.executed = turn.executed;
    s.valid = turn.parsed.valid();
    s.info = turn.result.info;
    s.score = turn.result.score;
    s.done = turn.result.done;
    rec.steps.push_back(std::move(s));
    last_hash = turn.result.frame.hash();
    if (options.observer)
      options.observer({session.step_index(), encode_png(turn.result.frame), turn.result.score, turn.result.done,
                        turn.result.info});
  }

  rec.final_frame_sha256 = last_hash.empty() || rec.aborted ? session.render().hash() : last_hash;
  rec.final_score = rec.aborted ? 0.0 : static_cast<double>(session.score());
  rec.valid_actions = agent.ledger().valid_actions();
  rec.total_actions = agent.ledger().total_actions();
  rec.valid_rate = agent.ledger().valid_rate();
  rec.duration_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
  return rec;
}

elo::PerformanceTuple performance(const EpisodeRecord& e) { return {e.final_score, e.valid_rate}; }

RoundResult run_round(const LevelSpec& level, const models::ModelProfile& a, const models::ModelProfile& b,
                      std::int64_t round, SessionSeed seed, models::BackendFactory& factory,
                      const std::optional<std::filesystem::path>& run_dir) {
  RoundResult out;
  EpisodeOptions options;
  options.round = round;
  options.run_dir = run_dir;
  {
    auto backend = factory.make(a, seed.value);
    out.a = run_episode(level, seed, a, *backend, options);
  }
  {
    auto backend = factory.make(b, seed.value);
    out.b = run_episode(level, seed, b, *backend, options);
  }
  elo::MatchRecord& m = out.match;
  m.game = std::string(to_string(level.game));
  m.level = level.key;
  m.round = round;
  m.session_seed = seed.value;
  m.model_a = a.name;
  m.model_b = b.name;
  m.f_a = performance(out.a);
  m.f_b = performance(out.b);
  m.outcome = elo::compare(m.f_a, m.f_b);
  return out;
}

std::uint64_t schedule_seed(std::uint64_t master_seed, const LevelSpec& level, std::int64_t round) {
  return derive_seed(master_seed, {fnv1a64(to_string(level.game)), fnv1a64(level.key), static_cast<std::uint64_t>(round)});
}

SessionSeed pair_session_seed(std::uint64_t schedule, std::size_t pair_index) {
  return {derive_seed(schedule, {1, static_cast<std::uint64_t>(pair_index)})};
}

EvaluationResult run_evaluation(const EvaluationConfig& cfg, const EvaluationHooks& hooks) {
  validate_for_ranking(cfg);
  const std::vector<LevelSpec> levels = selected_levels(cfg);
  if (models::remote_request_limit() != cfg.max_remote_requests) models::set_remote_request_limit(cfg.max_remote_requests);

  models::BackendFactory factory;
  for (const auto& profile : cfg.models) factory.check_ready(profile);

  const std::filesystem::path dir = cfg.output_dir;
  std::filesystem::create_directories(dir);
  const auto config_path = dir / kConfigFile;
  const auto pool_path = dir / kPoolFile;
  const auto trajectory_path = dir / kTrajectoryFile;
  if (std::filesystem::exists(config_path)) {
    std::ifstream in(config_path);
    const EvaluationConfig previous = config_from_json(nlohmann::json::parse(in));
    if (comparable_snapshot(previous) != comparable_snapshot(cfg))
      throw ConfigError(fmt::format("{} holds a run with a different config", dir.string()));
  }
  {
    std::ofstream out(config_path, std::ios::trunc);
    out << config_to_json(cfg).dump(2) << '\n';
  }

  const std::size_t pairs_per_round = cfg.models.size() / 2;
  EvaluationResult result;
  std::set<RoundKey> done;
  if (std::filesystem::exists(pool_path)) {
    bool torn = false;
    elo::ComparisonPool existing = read_partial_pool(pool_path, torn);
    done = complete_rounds(existing, pairs_per_round);
    elo::ComparisonPool kept;
    for (auto& m : existing)
      if (done.contains({m.level, m.round})) kept.push_back(std::move(m));
    if (torn || kept.size() != existing.size()) elo::write_pool(pool_path, kept);
    result.pool = std::move(kept);
  }
  if (std::filesystem::exists(trajectory_path)) {
    std::vector<EpisodeRecord> episodes = read_partial_trajectories(trajectory_path);
    std::vector<EpisodeRecord> kept;
    for (auto& e : episodes)
      if (done.contains({e.level, e.round})) kept.push_back(std::move(e));
    write_trajectories(trajectory_path, kept);
  }

  TrajectoryWriter trajectories(trajectory_path);
  std::vector<std::string> names;
  for (const auto& p : cfg.models) names.push_back(p.name);
  std::map<std::string, const models::ModelProfile*> by_name;
  for (const auto& p : cfg.models) by_name[p.name] = &p;
  const std::optional<std::filesystem::path> frame_root =
      cfg.save_frames ? std::optional<std::filesystem::path>(dir) : std::nullopt;

  for (const LevelSpec& level : levels) {
    for (std::int64_t round = 1; round <= cfg.rounds; ++round) {
      if (done.contains({level.key, round})) {
        ++result.rounds_skipped;
        continue;
      }
      const std::uint64_t schedule = schedule_seed(cfg.master_seed, level, round);
      Rng pairing_rng(derive_seed(schedule, {0}));
      const elo::Pairing pairing = elo::pair_models(names, pairing_rng);
      std::vector<RoundResult> results(pairing.pairs.size());
      auto play = [&](std::size_t i) {
        const auto& [a, b] = pairing.pairs[i];
        results[i] = run_round(level, *by_name.at(a), *by_name.at(b), round, pair_session_seed(schedule, i), factory,
                               frame_root);
      };
      const auto width = static_cast<std::size_t>(cfg.max_parallel_pairs);
      for (std::size_t first = 0; first < results.size(); first += width) {
        const std::size_t last = std::min(results.size(), first + width);
        if (last - first == 1) {
          play(first);
          continue;
        }
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(last - first);
        for (std::size_t i = first; i < last; ++i)
          workers.emplace_back([&, i] {
            try {
              play(i);
            } catch (...) {
              errors[i - first] = std::current_exception();
            }
          });
        for (auto& w : workers) w.join();
        for (auto& e : errors)
          if (e) std::rethrow_exception(e);
      }
      // Trajectories land before the pool so a round listed in the pool
      // always has its episodes on disk.
      for (const RoundResult& r : results) {
        trajectories.append(r.a);
        trajectories.append(r.b);
      }
      for (const RoundResult& r : results) {
        elo::append_match(pool_path, r.match);
        result.pool.push_back(r.match);
      }
      spdlog::info("{} round {}/{}: {} matches{}", level.key, round, cfg.rounds, results.size(),
                   pairing.bye ? fmt::format(", bye for {}", *pairing.bye) : std::string());
      if (hooks.on_round) hooks.on_round(level, round);
      ++result.rounds_run;
      if (hooks.stop_after_rounds && result.rounds_run >= *hooks.stop_after_rounds) return result;
    }
  }

  // A resumed run that raised `rounds` appends out of schedule order; the
  // file is rewritten to match what an uninterrupted run would hold.
  std::map<RoundKey, std::size_t> order;
  std::size_t rank = 0;
  for (const LevelSpec& level : levels)
    for (std::int64_t round = 1; round <= cfg.rounds; ++round) order[{level.key, round}] = rank++;
  auto position = [&](const elo::MatchRecord& m) {
    const auto it = order.find({m.level, m.round});
    return it == order.end() ? order.size() : it->second;
  };
  elo::ComparisonPool sorted = result.pool;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [&](const elo::MatchRecord& x, const elo::MatchRecord& y) { return position(x) < position(y); });
  if (sorted != result.pool) {
    elo::write_pool(pool_path, sorted);
    result.pool = std::move(sorted);
  }
  result.complete = true;
  return result;
}

}  // namespace pixelbench::harness
