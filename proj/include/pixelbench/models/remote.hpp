#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <string>

#include <json.hpp>

#include "pixelbench/models/backend.hpp"

namespace pixelbench::models {

// Bounds the number of in-flight remote requests across every client in the
// process. The limit can be changed only before the first request.
void set_remote_request_limit(int limit);
int remote_request_limit();

// Chat-completions client with interleaved text and base64 PNG parts.
//
// Transient failures (connection errors, 408, 425, 429, 5xx) are retried
// per the profile's RetryPolicy; other statuses fail immediately. The same
// serialized body is re-sent on every attempt. With a replay path set, the
// client never touches the network and answers from the capture file.
class RemoteChatClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  // Throws ConfigError when the profile lacks an endpoint or its key
  // variable is unset (replay mode needs neither).
  explicit RemoteChatClient(ModelProfile profile, Sleeper sleeper = {});

  ChatReply complete(const ChatRequest& request);

  nlohmann::json build_body(const ChatRequest& request) const;
  // Extracts reply text and usage; throws ProtocolError on a malformed body.
  static ChatReply parse_reply(const std::string& body);

  const ModelProfile& profile() const { return profile_; }
  std::int64_t requests_sent() const { return requests_sent_.load(); }

 private:
  ChatReply send_with_retry(const std::string& body);
  void record_capture(const std::string& digest, const ChatRequest& request, const ChatReply& reply);
  void load_replay();

  ModelProfile profile_;
  Sleeper sleeper_;
  std::string scheme_host_port_;
  std::string path_;
  std::atomic<std::int64_t> requests_sent_{0};
  std::mutex capture_mutex_;
  std::map<std::string, ChatReply> replay_;
};

class RemoteBackend final : public ModelBackend {
 public:
  explicit RemoteBackend(std::shared_ptr<RemoteChatClient> client) : client_(std::move(client)) {}
  ChatReply complete(const TurnContext& turn) override { return client_->complete(turn.request); }

 private:
  std::shared_ptr<RemoteChatClient> client_;
};

}  // namespace pixelbench::models
