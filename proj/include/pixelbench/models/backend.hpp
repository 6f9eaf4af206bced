#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "pixelbench/engine/game.hpp"
#include "pixelbench/models/chat.hpp"

namespace pixelbench::models {

enum class BackendKind { remote, random, oracle, human };

std::string_view to_string(BackendKind kind);

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};

  // Delay before attempt `attempt` (2-based; the first attempt never waits).
  std::chrono::milliseconds backoff_before(int attempt) const;
};

struct GenerationParams {
  int max_tokens = 1024;
  double temperature = 0.0;
};

// A ranked participant. Remote profiles name the environment variable that
// holds the key; the key itself is never part of a profile.
struct ModelProfile {
  std::string name;
  BackendKind kind = BackendKind::random;
  std::string endpoint_url;
  std::string model;
  std::string auth_env_var;
  GenerationParams generation;
  RetryPolicy retry;
  std::chrono::milliseconds request_timeout{60000};
  // Record request/reply pairs here (remote only; appended).
  std::string capture_path;
  // Serve replies from a previous capture instead of the network.
  std::string replay_path;
  // Random policy stream seed.
  std::uint64_t seed = 0;
  // Human relay per-step timeout.
  std::chrono::milliseconds human_timeout{30000};
};

// Throws ConfigError on unknown fields, a missing name, or an inline key.
ModelProfile profile_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const ModelProfile& p);

// What a backend sees for one turn. Frame-only backends must use `request`
// alone; `session` is there for perfect-information oracles.
struct TurnContext {
  const GameSession& session;
  const ChatRequest& request;
};

class ModelBackend {
 public:
  virtual ~ModelBackend() = default;
  virtual ChatReply complete(const TurnContext& turn) = 0;
};

class RemoteChatClient;
class HumanChannel;

// Builds one backend instance per episode. Remote clients are shared across
// episodes of the same profile so their request accounting is global.
class BackendFactory {
 public:
  BackendFactory();
  ~BackendFactory();

  // Channel used by human profiles; must outlive the created backends.
  void attach_human_channel(HumanChannel* channel) { human_ = channel; }

  std::unique_ptr<ModelBackend> make(const ModelProfile& profile, std::uint64_t episode_seed);
  // Throws ConfigError when a remote profile cannot be used (missing key).
  void check_ready(const ModelProfile& profile);
  std::shared_ptr<RemoteChatClient> remote(const ModelProfile& profile);

 private:
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<RemoteChatClient>> remotes_;
  HumanChannel* human_ = nullptr;
};

}  // namespace pixelbench::models
