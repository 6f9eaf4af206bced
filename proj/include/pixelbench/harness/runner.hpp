#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pixelbench/elo/elo.hpp"
#include "pixelbench/harness/config.hpp"
#include "pixelbench/harness/trajectory.hpp"
#include "pixelbench/models/backend.hpp"

namespace pixelbench::harness {

// A frame as delivered to live viewers: the initial frame, then one per step.
struct FrameEvent {
  std::int64_t step = 0;
  std::vector<std::uint8_t> png;
  double score = 0.0;
  bool done = false;
  std::string info;
};

struct EpisodeOptions {
  std::int64_t round = 0;
  // Run directory that frame files are written under; unset skips frames.
  std::optional<std::filesystem::path> run_dir;
  std::function<void(const FrameEvent&)> observer;
  std::string participant;
};

// Plays one episode through the baseline agent loop. A TransportError or
// ProtocolError from the backend ends the episode as aborted with score 0
// and the valid_rate of the steps taken so far. EpisodeAborted propagates.
EpisodeRecord run_episode(const LevelSpec& level, SessionSeed seed, const models::ModelProfile& profile,
                          models::ModelBackend& backend, const EpisodeOptions& options = {});

elo::PerformanceTuple performance(const EpisodeRecord& e);

struct RoundResult {
  EpisodeRecord a;
  EpisodeRecord b;
  elo::MatchRecord match;
};

// Both profiles play `level` on the same session seed.
RoundResult run_round(const LevelSpec& level, const models::ModelProfile& a, const models::ModelProfile& b,
                      std::int64_t round, SessionSeed seed, models::BackendFactory& factory,
                      const std::optional<std::filesystem::path>& run_dir = std::nullopt);

// Seed from which a (level, round) draws its pairing and session seeds.
std::uint64_t schedule_seed(std::uint64_t master_seed, const LevelSpec& level, std::int64_t round);
// Session seed for the pair at `pair_index` within a scheduled round.
SessionSeed pair_session_seed(std::uint64_t schedule, std::size_t pair_index);

struct EvaluationHooks {
  // Return after this many newly completed rounds, as a kill would.
  std::optional<int> stop_after_rounds;
  std::function<void(const LevelSpec&, std::int64_t round)> on_round;
};

struct EvaluationResult {
  elo::ComparisonPool pool;
  int rounds_run = 0;
  int rounds_skipped = 0;
  bool complete = false;
};

// Runs every selected (level, round) not yet present in the run
// directory's pool. Layout under cfg.output_dir: config.json,
// trajectories.jsonl, frames/, pool.jsonl. Throws ConfigError before any
// episode when a backend is not ready or the directory holds a run with a
// different config.
EvaluationResult run_evaluation(const EvaluationConfig& cfg, const EvaluationHooks& hooks = {});

inline constexpr const char* kConfigFile = "config.json";
inline constexpr const char* kTrajectoryFile = "trajectories.jsonl";
inline constexpr const char* kPoolFile = "pool.jsonl";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kFrameDir = "frames";

}  // namespace pixelbench::harness
