#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "pixelbench/engine/level.hpp"
#include "pixelbench/harness/trajectory.hpp"

namespace pixelbench::harness {

inline constexpr int kMessageSchemaVersion = 1;

// Server-to-client frame message.
struct FrameMessage {
  std::string session;
  std::int64_t episode = 0;
  std::int64_t step = 0;
  std::string png_base64;
  double score = 0.0;
  bool done = false;
  std::string info;
};

nlohmann::json frame_message_to_json(const FrameMessage& m);
FrameMessage frame_message_from_json(const nlohmann::json& j);

nlohmann::json level_to_json(const LevelSpec& level);
// Every registered level, grouped by game in catalog order.
nlohmann::json catalog_json();

struct WebPlayOptions {
  std::string host = "127.0.0.1";
  // 0 binds any free port.
  int port = 0;
  // Completed human episodes and their frames are recorded here.
  std::filesystem::path output_dir = "webplay";
  // Directory holding the browser client; empty serves a placeholder page.
  std::filesystem::path static_dir;
  std::chrono::milliseconds step_timeout{30000};
  std::uint64_t seed = 0;
  bool save_frames = true;
};

// HTTP message channel for turn-paced human play.
//
//   GET    /api/catalog
//   POST   /api/sessions                    {"participant": "p1"}        -> {"session": id}
//   POST   /api/sessions/{id}/messages      {"type": "reset", "game": g, "level": key-or-index, "seed"?: n}
//                                           {"type": "action", "action": "FLAP"}
//   GET    /api/sessions/{id}/frames?after=N&wait_ms=M   -> first frame message with step > N, or 204
//   DELETE /api/sessions/{id}                -> disconnect; a running episode is discarded
//
// Each session runs its episode through the standard agent loop with a
// human relay backend; finished episodes are appended to
// output_dir/trajectories.jsonl. Resetting or disconnecting mid-episode
// discards the episode.
class WebPlayServer {
 public:
  explicit WebPlayServer(WebPlayOptions options);
  ~WebPlayServer();
  WebPlayServer(const WebPlayServer&) = delete;
  WebPlayServer& operator=(const WebPlayServer&) = delete;

  // Binds and starts serving on a background thread; returns the port.
  // Throws ConfigError when the address cannot be bound.
  int start();
  void stop();
  // Blocks until stop() is called from another thread.
  void wait();
  int port() const;

  std::vector<EpisodeRecord> completed_episodes() const;
  std::filesystem::path trajectory_path() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pixelbench::harness
