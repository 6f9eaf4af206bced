#include "pixelbench/models/backend.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "pixelbench/core/errors.hpp"
#include "pixelbench/core/rng.hpp"
#include "pixelbench/models/human.hpp"
#include "pixelbench/models/policies.hpp"
#include "pixelbench/models/remote.hpp"

namespace pixelbench::models {
namespace {

BackendKind parse_kind(const std::string& text) {
  if (text == "remote") return BackendKind::remote;
  if (text == "random") return BackendKind::random;
  if (text == "oracle") return BackendKind::oracle;
  if (text == "human") return BackendKind::human;
  throw ConfigError(fmt::format("unknown backend kind '{}'", text));
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, std::string_view where) {
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(fmt::format("{}: unknown field '{}'", where, k));
}

}  // namespace

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::remote: return "remote";
    case BackendKind::random: return "random";
    case BackendKind::oracle: return "oracle";
    case BackendKind::human: return "human";
  }
  return "?";
}

std::chrono::milliseconds RetryPolicy::backoff_before(int attempt) const {
  if (attempt <= 1) return std::chrono::milliseconds{0};
  const double raw = static_cast<double>(initial_backoff.count()) * std::pow(multiplier, attempt - 2);
  const double capped = std::min(raw, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds{static_cast<std::int64_t>(capped)};
}

ModelProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("model profile must be an object");
  for (const char* secret : {"api_key", "key", "token", "authorization"})
    if (j.contains(secret))
      throw ConfigError(fmt::format("model profiles must not contain '{}'; name an environment variable in auth_env_var",
                                    secret));
  reject_unknown(j,
                 {"name", "kind", "endpoint_url", "model", "auth_env_var", "max_tokens", "temperature", "retry",
                  "request_timeout_ms", "capture", "replay", "seed", "human_timeout_ms"},
                 "model profile");
  ModelProfile p;
  try {
    p.name = j.at("name").get<std::string>();
    p.kind = parse_kind(j.at("kind").get<std::string>());
    p.endpoint_url = j.value("endpoint_url", "");
    p.model = j.value("model", "");
    p.auth_env_var = j.value("auth_env_var", "");
    p.generation.max_tokens = j.value("max_tokens", p.generation.max_tokens);
    p.generation.temperature = j.value("temperature", p.generation.temperature);
    if (j.contains("retry")) {
      const auto& r = j["retry"];
      reject_unknown(r, {"max_attempts", "initial_backoff_ms", "multiplier", "max_backoff_ms"}, "retry policy");
      p.retry.max_attempts = r.value("max_attempts", p.retry.max_attempts);
      p.retry.initial_backoff = std::chrono::milliseconds{r.value("initial_backoff_ms", p.retry.initial_backoff.count())};
      p.retry.multiplier = r.value("multiplier", p.retry.multiplier);
      p.retry.max_backoff = std::chrono::milliseconds{r.value("max_backoff_ms", p.retry.max_backoff.count())};
    }
    p.request_timeout = std::chrono::milliseconds{j.value("request_timeout_ms", p.request_timeout.count())};
    p.capture_path = j.value("capture", "");
    p.replay_path = j.value("replay", "");
    p.seed = j.value("seed", std::uint64_t{0});
    p.human_timeout = std::chrono::milliseconds{j.value("human_timeout_ms", p.human_timeout.count())};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("model profile: {}", e.what()));
  }
  if (p.name.empty()) throw ConfigError("model profile needs a non-empty name");
  return p;
}

nlohmann::json profile_to_json(const ModelProfile& p) {
  nlohmann::json j{{"name", p.name}, {"kind", to_string(p.kind)}};
  switch (p.kind) {
    case BackendKind::remote:
      j["endpoint_url"] = p.endpoint_url;
      j["model"] = p.model;
      j["auth_env_var"] = p.auth_env_var;
      j["max_tokens"] = p.generation.max_tokens;
      j["temperature"] = p.generation.temperature;
      j["retry"] = {{"max_attempts", p.retry.max_attempts},
                    {"initial_backoff_ms", p.retry.initial_backoff.count()},
                    {"multiplier", p.retry.multiplier},
                    {"max_backoff_ms", p.retry.max_backoff.count()}};
      j["request_timeout_ms"] = p.request_timeout.count();
      if (!p.capture_path.empty()) j["capture"] = p.capture_path;
      if (!p.replay_path.empty()) j["replay"] = p.replay_path;
      break;
    case BackendKind::random: j["seed"] = p.seed; break;
    case BackendKind::human: j["human_timeout_ms"] = p.human_timeout.count(); break;
    case BackendKind::oracle: break;
  }
  return j;
}

BackendFactory::BackendFactory() = default;
BackendFactory::~BackendFactory() = default;

std::shared_ptr<RemoteChatClient> BackendFactory::remote(const ModelProfile& profile) {
  std::lock_guard lock(mutex_);
  auto& slot = remotes_[profile.name];
  if (!slot) slot = std::make_shared<RemoteChatClient>(profile);
  return slot;
}

void BackendFactory::check_ready(const ModelProfile& profile) {
  if (profile.kind == BackendKind::remote) remote(profile);
  if (profile.kind == BackendKind::human && human_ == nullptr)
    throw ConfigError(fmt::format("profile {}: human backends need a web-play relay", profile.name));
}

std::unique_ptr<ModelBackend> BackendFactory::make(const ModelProfile& profile, std::uint64_t episode_seed) {
  switch (profile.kind) {
    case BackendKind::remote: return std::make_unique<RemoteBackend>(remote(profile));
    case BackendKind::random: return std::make_unique<RandomPolicy>(derive_seed(profile.seed, {episode_seed}));
    case BackendKind::oracle: return std::make_unique<OracleBackend>();
    case BackendKind::human:
      if (human_ == nullptr) throw ConfigError(fmt::format("profile {}: no human relay attached", profile.name));
      return std::make_unique<HumanRelay>(*human_, profile.human_timeout);
  }
  throw ConfigError("unreachable backend kind");
}

}  // namespace pixelbench::models
