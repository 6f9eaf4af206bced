#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pixelbench/engine/game.hpp"
#include "pixelbench/engine/types.hpp"

namespace pixelbench::harness {

inline constexpr int kTrajectorySchemaVersion = 1;

struct StepEntry {
  std::int64_t step_index = 0;
  // Relative to the run directory; empty when frames were not saved.
  std::string frame_file;
  // Frame::hash() of the frame shown for this step.
  std::string frame_sha256;
  std::string prompt_transcript;
  std::size_t prompt_images = 0;
  std::string raw_reply;
  // Text after the reply's last Action label, before normalization.
  std::string action_text;
  std::optional<Action> parsed_action;
  // What the engine executed (NONE for an invalid reply).
  Action executed = Action::NONE;
  bool valid = false;
  std::string info;
  double score = 0.0;
  bool done = false;
};

struct EpisodeRecord {
  std::string model;
  std::string backend;
  std::string game;
  std::string level;  // registry key
  std::int64_t round = 0;
  std::uint64_t session_seed = 0;
  int max_steps = 0;
  std::vector<StepEntry> steps;
  double final_score = 0.0;
  // Hash of the frame after the last executed step.
  std::string final_frame_sha256;
  std::int64_t valid_actions = 0;
  std::int64_t total_actions = 0;
  double valid_rate = 0.0;
  // Set when the backend failed mid-episode; the episode then scores 0.
  bool aborted = false;
  std::string abort_reason;
  std::int64_t duration_ms = 0;
  // Free-form tag, e.g. the participant id of a human episode.
  std::string participant;
};

nlohmann::json episode_to_json(const EpisodeRecord& e);
// Throws ConfigError on a malformed record.
EpisodeRecord episode_from_json(const nlohmann::json& j);

// Line-delimited trajectory file, appended one episode at a time.
class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(std::filesystem::path path) : path_(std::move(path)) {}
  void append(const EpisodeRecord& e);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
};

std::vector<EpisodeRecord> read_trajectories(const std::filesystem::path& path);
void write_trajectories(const std::filesystem::path& path, const std::vector<EpisodeRecord>& episodes);

struct ReplayOutcome {
  bool ok = true;
  // Index into EpisodeRecord::steps of the first mismatch.
  std::optional<std::int64_t> divergent_step;
  std::string message;
  double replayed_score = 0.0;
};

struct ReplayOptions {
  // When set, every re-rendered frame is written here as step_NNNN.png.
  std::optional<std::filesystem::path> frame_dump;
  // Re-parse each raw reply and require it to yield the recorded action.
  bool check_replies = true;
};

// Re-simulates the episode from its level and session seed with the
// recorded executed actions, comparing frame hashes, parsed actions, info,
// score and done flags step by step, then the final score.
ReplayOutcome verify_episode(const EpisodeRecord& e, const ReplayOptions& options = {});

}  // namespace pixelbench::harness
