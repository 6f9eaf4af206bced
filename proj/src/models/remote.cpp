#include "pixelbench/models/remote.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <semaphore>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "pixelbench/core/digest.hpp"
#include "pixelbench/core/errors.hpp"

namespace pixelbench::models {
namespace {

constexpr std::ptrdiff_t kMaxRequestLimit = 1024;

std::atomic<int> g_limit{4};
std::atomic<bool> g_gate_created{false};

std::counting_semaphore<kMaxRequestLimit>& request_gate() {
  static std::counting_semaphore<kMaxRequestLimit> gate([] {
    g_gate_created = true;
    return static_cast<std::ptrdiff_t>(g_limit.load());
  }());
  return gate;
}

class GateSlot {
 public:
  GateSlot() { request_gate().acquire(); }
  ~GateSlot() { request_gate().release(); }
  GateSlot(const GateSlot&) = delete;
  GateSlot& operator=(const GateSlot&) = delete;
};

bool transient_status(int status) {
  return status == 408 || status == 425 || status == 429 || status >= 500;
}

}  // namespace

void set_remote_request_limit(int limit) {
  if (limit < 1 || limit > kMaxRequestLimit)
    throw ConfigError(fmt::format("remote request limit must be in [1, {}]", kMaxRequestLimit));
  if (g_gate_created) throw StateError("remote request limit is fixed once requests have started");
  g_limit = limit;
}

int remote_request_limit() { return g_limit.load(); }

RemoteChatClient::RemoteChatClient(ModelProfile profile, Sleeper sleeper)
    : profile_(std::move(profile)), sleeper_(std::move(sleeper)) {
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (!profile_.replay_path.empty()) {
    load_replay();
    return;
  }
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(profile_.endpoint_url, m, kUrl))
    throw ConfigError(fmt::format("profile {}: endpoint_url must be an http(s) URL", profile_.name));
  scheme_host_port_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/";
  if (profile_.auth_env_var.empty())
    throw ConfigError(fmt::format("profile {}: auth_env_var is required for remote backends", profile_.name));
  const char* key = std::getenv(profile_.auth_env_var.c_str());
  if (key == nullptr || *key == '\0')
    throw ConfigError(fmt::format("profile {}: environment variable {} is not set", profile_.name,
                                  profile_.auth_env_var));
  if (profile_.retry.max_attempts < 1)
    throw ConfigError(fmt::format("profile {}: retry.max_attempts must be at least 1", profile_.name));
}

nlohmann::json RemoteChatClient::build_body(const ChatRequest& request) const {
  nlohmann::json content = nlohmann::json::array();
  for (const ChatPart& part : request.parts) {
    if (part.kind == ChatPart::Kind::text) {
      content.push_back({{"type", "text"}, {"text", part.text}});
    } else {
      content.push_back(
          {{"type", "image_url"}, {"image_url", {{"url", "data:image/png;base64," + base64_encode(part.png)}}}});
    }
  }
  return {
      {"model", profile_.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", content}}})},
      {"max_tokens", profile_.generation.max_tokens},
      {"temperature", profile_.generation.temperature},
  };
}

ChatReply RemoteChatClient::parse_reply(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(fmt::format("reply is not JSON: {}", e.what()));
  }
  if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
    throw ProtocolError("reply has no choices");
  const auto& message = j["choices"][0].value("message", nlohmann::json::object());
  ChatReply reply;
  const auto content = message.value("content", nlohmann::json());
  if (content.is_string()) {
    reply.text = content.get<std::string>();
  } else if (content.is_array()) {
    for (const auto& part : content)
      if (part.is_object() && part.value("type", "") == "text") reply.text += part.value("text", "");
  } else {
    throw ProtocolError("reply message has no text content");
  }
  if (j.contains("usage") && j["usage"].is_object()) {
    reply.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0);
    reply.usage.completion_tokens = j["usage"].value("completion_tokens", 0);
  }
  return reply;
}

ChatReply RemoteChatClient::complete(const ChatRequest& request) {
  const std::string body = build_body(request).dump();
  const std::string digest = sha256_hex(body);
  if (!profile_.replay_path.empty()) {
    auto it = replay_.find(digest);
    if (it == replay_.end())
      throw TransportError(fmt::format("profile {}: no captured reply for request {}", profile_.name, digest));
    return it->second;
  }
  ChatReply reply = send_with_retry(body);
  if (!profile_.capture_path.empty()) record_capture(digest, request, reply);
  return reply;
}

ChatReply RemoteChatClient::send_with_retry(const std::string& body) {
  std::string last_error;
  for (int attempt = 1; attempt <= profile_.retry.max_attempts; ++attempt) {
    if (attempt > 1) sleeper_(profile_.retry.backoff_before(attempt));
    // The key is read per attempt and only ever placed in the header.
    const char* key = std::getenv(profile_.auth_env_var.c_str());
    if (key == nullptr) throw ConfigError(fmt::format("environment variable {} is not set", profile_.auth_env_var));

    httplib::Result res = [&] {
      GateSlot slot;
      ++requests_sent_;
      httplib::Client client(scheme_host_port_);
      const auto timeout = profile_.request_timeout;
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);
      const httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};
      return client.Post(path_, headers, body, "application/json");
    }();

    if (!res) {
      last_error = fmt::format("connection error: {}", httplib::to_string(res.error()));
    } else if (res->status >= 200 && res->status < 300) {
      ChatReply reply = parse_reply(res->body);
      reply.usage.attempts = attempt;
      spdlog::debug("profile {}: reply after {} attempt(s)", profile_.name, attempt);
      return reply;
    } else {
      last_error = fmt::format("HTTP status {}", res->status);
      if (!transient_status(res->status)) {
        spdlog::warn("profile {}: attempt {} failed with {} (not retried)", profile_.name, attempt, last_error);
        throw TransportError(fmt::format("profile {}: {}", profile_.name, last_error));
      }
    }
    spdlog::warn("profile {}: attempt {}/{} failed: {}", profile_.name, attempt, profile_.retry.max_attempts,
                 last_error);
  }
  throw TransportError(
      fmt::format("profile {}: gave up after {} attempts: {}", profile_.name, profile_.retry.max_attempts, last_error));
}

void RemoteChatClient::record_capture(const std::string& digest, const ChatRequest& request, const ChatReply& reply) {
  const nlohmann::json line{
      {"request_sha256", digest},
      {"transcript", request.transcript()},
      {"reply", reply.text},
      {"usage", {{"prompt_tokens", reply.usage.prompt_tokens}, {"completion_tokens", reply.usage.completion_tokens}}},
  };
  std::lock_guard lock(capture_mutex_);
  std::ofstream out(profile_.capture_path, std::ios::app);
  if (!out) throw ConfigError(fmt::format("cannot append to capture file {}", profile_.capture_path));
  out << line.dump() << '\n';
}

void RemoteChatClient::load_replay() {
  std::ifstream in(profile_.replay_path);
  if (!in) throw ConfigError(fmt::format("cannot read replay file {}", profile_.replay_path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    ChatReply reply;
    reply.text = j.at("reply").get<std::string>();
    if (j.contains("usage")) {
      reply.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0);
      reply.usage.completion_tokens = j["usage"].value("completion_tokens", 0);
    }
    replay_.emplace(j.at("request_sha256").get<std::string>(), std::move(reply));
  }
}

}  // namespace pixelbench::models
