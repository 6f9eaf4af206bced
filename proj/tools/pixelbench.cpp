#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "pixelbench/core/errors.hpp"
#include "pixelbench/elo/elo.hpp"
#include "pixelbench/games/catalog.hpp"
#include "pixelbench/games/rulebook.hpp"
#include "pixelbench/harness/baseline.hpp"
#include "pixelbench/harness/config.hpp"
#include "pixelbench/harness/runner.hpp"
#include "pixelbench/harness/trajectory.hpp"
#include "pixelbench/harness/webplay.hpp"

namespace {

using namespace pixelbench;

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path));
  out << text;
}

std::string render_report(const elo::RatingReport& report, const std::string& format) {
  if (format == "text") return elo::report_to_text(report);
  return elo::report_to_json(report).dump(2) + "\n";
}

struct RunArgs {
  std::string config;
  std::vector<std::string> games;
  std::vector<std::string> levels;
  std::vector<std::string> models;
  std::optional<int> rounds;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool admit_oracles = false;
  bool no_frames = false;
};

int cmd_run(const RunArgs& args) {
  harness::EvaluationConfig cfg = harness::load_config(args.config);
  if (!args.games.empty()) {
    cfg.games = args.games;
    cfg.levels.clear();
  }
  if (!args.levels.empty()) cfg.levels = args.levels;
  if (!args.models.empty()) {
    const std::set<std::string> wanted(args.models.begin(), args.models.end());
    std::vector<models::ModelProfile> kept;
    for (const auto& p : cfg.models)
      if (wanted.contains(p.name)) kept.push_back(p);
    if (kept.size() != wanted.size()) throw ConfigError("--models names a model that the config does not define");
    cfg.models = std::move(kept);
  }
  if (args.rounds) cfg.rounds = *args.rounds;
  if (args.seed) cfg.master_seed = *args.seed;
  if (!args.out.empty()) cfg.output_dir = args.out;
  if (args.admit_oracles) cfg.admit_oracles = true;
  if (args.no_frames) cfg.save_frames = false;

  const harness::EvaluationResult result = harness::run_evaluation(cfg);
  const elo::RatingReport report = elo::report(result.pool, cfg.stabilization);
  write_text((cfg.output_dir / harness::kReportFile).string(), elo::report_to_json(report).dump(2) + "\n");
  fmt::print("{} rounds run, {} resumed, {} match records in {}\n", result.rounds_run, result.rounds_skipped,
             result.pool.size(), (cfg.output_dir / harness::kPoolFile).string());
  fmt::print("{}", elo::report_to_text(report));
  return 0;
}

struct RankArgs {
  std::string pool;
  std::string run_dir;
  elo::StabilizationConfig stab;
  std::string format = "json";
  std::string out;
};

int cmd_rank(const RankArgs& args) {
  std::filesystem::path pool_path = args.pool;
  if (pool_path.empty()) {
    if (args.run_dir.empty()) throw ConfigError("rank needs --pool or --run");
    pool_path = std::filesystem::path(args.run_dir) / harness::kPoolFile;
  }
  const elo::ComparisonPool pool = elo::read_pool(pool_path);
  write_text(args.out, render_report(elo::report(pool, args.stab), args.format));
  return 0;
}

struct PlayArgs {
  harness::WebPlayOptions options;
  int step_timeout_ms = 30000;
};

int cmd_play(PlayArgs args) {
  args.options.step_timeout = std::chrono::milliseconds(args.step_timeout_ms);
  harness::WebPlayServer server(args.options);
  const int port = server.start();
  fmt::print("web-play serving http://{}:{}/ (Ctrl-C to stop)\n", args.options.host, port);
  std::fflush(stdout);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(200));
  server.stop();
  fmt::print("{} completed human episodes recorded in {}\n", server.completed_episodes().size(),
             server.trajectory_path().string());
  return 0;
}

struct ReplayArgs {
  std::string trajectories;
  std::optional<std::size_t> index;
  std::string frames_out;
  bool skip_reply_check = false;
};

int cmd_replay(const ReplayArgs& args) {
  const std::vector<harness::EpisodeRecord> episodes = harness::read_trajectories(args.trajectories);
  if (args.index && *args.index >= episodes.size())
    throw ConfigError(fmt::format("--index {} is out of range ({} episodes)", *args.index, episodes.size()));
  int failures = 0;
  int checked = 0;
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    if (args.index && i != *args.index) continue;
    const auto& e = episodes[i];
    harness::ReplayOptions options;
    options.check_replies = !args.skip_reply_check;
    if (!args.frames_out.empty()) options.frame_dump = std::filesystem::path(args.frames_out) / fmt::format("episode_{:04}", i);
    const harness::ReplayOutcome outcome = harness::verify_episode(e, options);
    ++checked;
    if (outcome.ok) {
      fmt::print("episode {} ({} on {}, round {}): ok, score {}\n", i, e.model, e.level, e.round, outcome.replayed_score);
    } else {
      ++failures;
      fmt::print("episode {} ({} on {}, round {}): MISMATCH at {}\n", i, e.model, e.level, e.round, outcome.message);
    }
  }
  fmt::print("{} of {} episodes replayed without divergence\n", checked - failures, checked);
  return failures == 0 ? 0 : 1;
}

struct BaselineArgs {
  std::string trajectories;
  std::string level;
  int participants = 5;
  std::string store;
  std::string list;
};

int cmd_baseline(const BaselineArgs& args) {
  if (!args.list.empty()) {
    for (const auto& b : harness::load_baselines(args.list))
      fmt::print("{:<20} mean {:>8.2f} over {} participants\n", b.level, b.mean, b.scores.size());
    return 0;
  }
  if (args.trajectories.empty() || args.level.empty())
    throw ConfigError("baseline needs --trajectories and --level (or --list)");
  const LevelSpec& level = games::LevelRegistry::builtin().get(args.level);
  const harness::HumanBaseline b =
      harness::collect_human_baseline(harness::read_trajectories(args.trajectories), level, args.participants);
  for (std::size_t i = 0; i < b.scores.size(); ++i) fmt::print("  {:<16} {}\n", b.participants[i], b.scores[i]);
  fmt::print("{} baseline: mean {} over {} participants\n", b.level, b.mean, b.scores.size());
  if (!args.store.empty()) harness::store_baseline(args.store, b);
  return 0;
}

int cmd_catalog(bool json, const std::string& rules_level) {
  const auto& levels = games::LevelRegistry::builtin().levels();
  if (!rules_level.empty()) {
    fmt::print("{}", games::rulebook_document(games::LevelRegistry::builtin().get(rules_level)));
    return 0;
  }
  if (json) {
    fmt::print("{}\n", harness::catalog_json().dump(2));
    return 0;
  }
  fmt::print("{} levels\n", levels.size());
  for (const LevelSpec& level : levels) {
    std::string params;
    for (const auto& [name, value] : level.params) params += fmt::format(" {}={}", name, value);
    fmt::print("{:<18} {:<11} {:<18} {:<12} steps={:<4} history={} human={}{}\n", level.key, to_string(level.game),
               level.name, to_string(level.perspective), level.max_steps, level.history_frames, level.human_max_score,
               params);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Game-based evaluation harness for multimodal models"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")->capture_default_str();

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run an evaluation from a config file");
  run_cmd->add_option("config", run.config, "Evaluation config (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--games", run.games, "Restrict to these games")->delimiter(',');
  run_cmd->add_option("--levels", run.levels, "Restrict to these level keys")->delimiter(',');
  run_cmd->add_option("--models", run.models, "Restrict to these model names")->delimiter(',');
  run_cmd->add_option("--rounds", run.rounds, "Rounds per level")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed, "Master seed");
  run_cmd->add_option("--out", run.out, "Run directory");
  run_cmd->add_flag("--admit-oracles", run.admit_oracles, "Allow scripted oracles in the ranked pool");
  run_cmd->add_flag("--no-frames", run.no_frames, "Do not write frame PNGs");

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "Compute stabilized Elo ratings from a pool");
  rank_cmd->add_option("--pool", rank.pool, "Pool file (JSONL)");
  rank_cmd->add_option("--run", rank.run_dir, "Run directory holding pool.jsonl");
  rank_cmd->add_option("--passes", rank.stab.passes, "Shuffled passes")->check(CLI::PositiveNumber)->capture_default_str();
  rank_cmd->add_option("--k-factor", rank.stab.k_factor, "Elo K factor")->check(CLI::PositiveNumber)->capture_default_str();
  rank_cmd->add_option("--seed", rank.stab.shuffle_seed, "Shuffle seed")->capture_default_str();
  rank_cmd->add_option("--threads", rank.stab.threads, "Worker threads (0: all cores)")->capture_default_str();
  rank_cmd->add_option("--format", rank.format, "json or text")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  rank_cmd->add_option("--out", rank.out, "Output file (default stdout)");

  PlayArgs play;
  auto* play_cmd = app.add_subcommand("play", "Serve turn-paced human play over HTTP");
  play_cmd->add_option("--port", play.options.port, "Port (0 picks one)")->capture_default_str();
  play_cmd->add_option("--host", play.options.host, "Bind address")->capture_default_str();
  play_cmd->add_option("--out", play.options.output_dir, "Directory for recorded episodes")->capture_default_str();
  play_cmd->add_option("--static", play.options.static_dir, "Browser client directory");
  play_cmd->add_option("--seed", play.options.seed, "Seed for session layouts")->capture_default_str();
  play_cmd->add_option("--step-timeout-ms", play.step_timeout_ms, "Per-step input timeout")->capture_default_str();

  ReplayArgs replay;
  auto* replay_cmd = app.add_subcommand("replay", "Re-simulate recorded episodes and check them");
  replay_cmd->add_option("trajectories", replay.trajectories, "Trajectory file (JSONL)")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--index", replay.index, "Only this episode (0-based line index)");
  replay_cmd->add_option("--frames-out", replay.frames_out, "Dump re-rendered frames here");
  replay_cmd->add_flag("--skip-reply-check", replay.skip_reply_check, "Do not re-parse recorded replies");

  BaselineArgs baseline;
  auto* baseline_cmd = app.add_subcommand("baseline", "Compute or list human baselines");
  baseline_cmd->add_option("--trajectories", baseline.trajectories, "Human episodes (JSONL)");
  baseline_cmd->add_option("--level", baseline.level, "Level key");
  baseline_cmd->add_option("--participants", baseline.participants, "Participants required")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  baseline_cmd->add_option("--store", baseline.store, "Write the baseline into this baselines.json");
  baseline_cmd->add_option("--list", baseline.list, "List baselines stored in this file");

  bool catalog_json = false;
  auto* catalog_cmd = app.add_subcommand("catalog", "List games and levels");
  catalog_cmd->add_flag("--json", catalog_json, "Print JSON");
  std::string rules_level;
  catalog_cmd->add_option("--rules", rules_level, "Print the prompt rules for this level key");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_default_logger(spdlog::stderr_color_mt("pixelbench"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run_cmd) return cmd_run(run);
    if (*rank_cmd) return cmd_rank(rank);
    if (*play_cmd) return cmd_play(play);
    if (*replay_cmd) return cmd_replay(replay);
    if (*baseline_cmd) return cmd_baseline(baseline);
    if (*catalog_cmd) return cmd_catalog(catalog_json, rules_level);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 1;
}
