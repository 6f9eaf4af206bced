#pragma once

#include <atomic>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

namespace pixelbench::testing {

// Local chat-completions endpoint. The first `failures` requests answer with
// `failure_status`; later ones return `reply_text`.
class MockChatServer {
 public:
  explicit MockChatServer(std::string reply_text, int failures = 0, int failure_status = 503)
      : reply_text_(std::move(reply_text)), failures_(failures), failure_status_(failure_status) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex_);
      bodies.push_back(req.body);
      auth_headers.push_back(req.get_header_value("Authorization"));
      if (static_cast<int>(bodies.size()) <= failures_) {
        res.status = failure_status_;
        res.set_content(R"({"error":"try later"})", "application/json");
        return;
      }
      const nlohmann::json reply{
          {"choices", {{{"message", {{"role", "assistant"}, {"content", reply_text_}}}}}},
          {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 7}}},
      };
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockChatServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
  std::size_t request_count() {
    std::lock_guard lock(mutex_);
    return bodies.size();
  }

  std::vector<std::string> bodies;
  std::vector<std::string> auth_headers;

 private:
  httplib::Server server_;
  std::string reply_text_;
  int failures_;
  int failure_status_;
  int port_ = 0;
  std::thread thread_;
  std::mutex mutex_;
};

}  // namespace pixelbench::testing
