#include "pixelbench/harness/webplay.hpp"

#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "pixelbench/core/digest.hpp"
#include "pixelbench/core/errors.hpp"
#include "pixelbench/core/rng.hpp"
#include "pixelbench/games/catalog.hpp"
#include "pixelbench/harness/runner.hpp"
#include "pixelbench/models/human.hpp"

namespace pixelbench::harness {
namespace {

constexpr std::string_view kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>pixelbench play</title></head>
<body><p>The browser client is not installed. Start the server with --static pointing at the built client,
or drive the JSON API under /api directly.</p></body></html>
)";

constexpr auto kMaxWait = std::chrono::milliseconds(30000);

void reply_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply_json(res, status, {{"error", message}});
}

// One browser tab. Acts as the relay's action source.
class PlaySession final : public models::HumanChannel {
 public:
  PlaySession(std::string id, std::string participant) : id_(std::move(id)), participant_(std::move(participant)) {}
  ~PlaySession() override { abort_episode(); }

  const std::string& id() const { return id_; }
  const std::string& participant() const { return participant_; }

  std::optional<Action> next_action(std::chrono::milliseconds timeout) override {
    std::unique_lock lock(mutex_);
    cv_.wait_for(lock, timeout, [&] { return !queue_.empty() || abort_; });
    if (abort_) throw EpisodeAborted(fmt::format("session {} left the episode", id_));
    if (queue_.empty()) return std::nullopt;
    const Action a = queue_.front();
    queue_.pop_front();
    return a;
  }

  // Stops the running episode, if any, and waits for its thread.
  void abort_episode() {
    std::thread worker;
    {
      std::lock_guard lock(mutex_);
      abort_ = true;
      worker = std::move(worker_);
      cv_.notify_all();
    }
    if (worker.joinable()) worker.join();
  }

  template <typename Runner>
  std::int64_t begin_episode(const LevelSpec& level, Runner runner) {
    abort_episode();
    std::lock_guard lock(mutex_);
    abort_ = false;
    queue_.clear();
    frames_.clear();
    level_ = level;
    alphabet_.assign(runner.alphabet.begin(), runner.alphabet.end());
    running_ = true;
    const std::int64_t episode = ++episode_;
    worker_ = std::thread([this, runner = std::move(runner), episode]() mutable { runner(*this, episode); });
    return episode;
  }

  void publish(std::int64_t episode, const FrameEvent& event) {
    std::lock_guard lock(mutex_);
    if (episode != episode_) return;
    frames_.push_back({id_, episode, event.step, base64_encode(event.png), event.score, event.done, event.info});
    cv_.notify_all();
  }

  void finish(std::int64_t episode) {
    std::lock_guard lock(mutex_);
    if (episode == episode_) running_ = false;
    cv_.notify_all();
  }

  // Empty string on success, otherwise the rejection reason with an HTTP
  // status in `status`.
  std::string submit(std::string_view token, int& status) {
    const std::optional<Action> a = parse_action(token);
    std::lock_guard lock(mutex_);
    if (!running_) {
      status = 409;
      return "no episode is running; send a reset first";
    }
    if (!a || !contains(alphabet_, *a)) {
      status = 400;
      return fmt::format("'{}' is not in the {} action alphabet", token, level_.key);
    }
    if (!queue_.empty()) {
      status = 409;
      return "an action is already pending for this step";
    }
    queue_.push_back(*a);
    cv_.notify_all();
    status = 200;
    return {};
  }

  std::optional<FrameMessage> frame_after(std::int64_t after, std::chrono::milliseconds wait) {
    std::unique_lock lock(mutex_);
    auto find = [&]() -> const FrameMessage* {
      for (const auto& f : frames_)
        if (f.step > after) return &f;
      return nullptr;
    };
    cv_.wait_for(lock, wait, [&] { return find() != nullptr; });
    if (const FrameMessage* f = find()) return *f;
    return std::nullopt;
  }

  std::int64_t episode() const {
    std::lock_guard lock(mutex_);
    return episode_;
  }

 private:
  std::string id_;
  std::string participant_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Action> queue_;
  std::vector<FrameMessage> frames_;
  std::vector<Action> alphabet_;
  LevelSpec level_;
  std::thread worker_;
  std::int64_t episode_ = 0;
  bool abort_ = false;
  bool running_ = false;
};

const LevelSpec* resolve_level(const nlohmann::json& msg, std::string& error) {
  const auto& registry = games::LevelRegistry::builtin();
  if (!msg.contains("level")) {
    error = "reset needs a level";
    return nullptr;
  }
  const auto& level = msg.at("level");
  if (level.is_string()) {
    const LevelSpec* spec = registry.find(level.get<std::string>());
    if (spec == nullptr) error = fmt::format("unknown level '{}'", level.get<std::string>());
    return spec;
  }
  if (!level.is_number_integer() || !msg.contains("game") || !msg.at("game").is_string()) {
    error = "level must be a registry key, or an index together with a game name";
    return nullptr;
  }
  const auto game = parse_game_id(msg.at("game").get<std::string>());
  if (!game) {
    error = fmt::format("unknown game '{}'", msg.at("game").get<std::string>());
    return nullptr;
  }
  for (const LevelSpec* spec : registry.for_game(*game))
    if (spec->level_index == level.get<int>()) return spec;
  error = fmt::format("{} has no level {}", msg.at("game").get<std::string>(), level.get<int>());
  return nullptr;
}

}  // namespace

nlohmann::json frame_message_to_json(const FrameMessage& m) {
  return {{"type", "frame"},        {"schema_version", kMessageSchemaVersion},
          {"session", m.session},   {"episode", m.episode},
          {"step", m.step},         {"png_base64", m.png_base64},
          {"score", m.score},       {"done", m.done},
          {"info", m.info}};
}

FrameMessage frame_message_from_json(const nlohmann::json& j) {
  try {
    return {j.at("session").get<std::string>(), j.at("episode").get<std::int64_t>(), j.at("step").get<std::int64_t>(),
            j.at("png_base64").get<std::string>(), j.at("score").get<double>(),     j.at("done").get<bool>(),
            j.at("info").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(fmt::format("malformed frame message: {}", e.what()));
  }
}

nlohmann::json level_to_json(const LevelSpec& level) {
  const GameSession probe = games::create_session(level, SessionSeed{0});
  return {
      {"key", level.key},
      {"name", level.name},
      {"game", to_string(level.game)},
      {"level_index", level.level_index},
      {"perspective", to_string(level.perspective)},
      {"max_steps", level.max_steps},
      {"history_frames", level.history_frames},
      {"human_max_score", level.human_max_score},
      {"alphabet", action_names(probe.alphabet())},
      {"params", level.params},
  };
}

nlohmann::json catalog_json() {
  nlohmann::json games = nlohmann::json::array();
  std::map<GameId, std::size_t> slot;
  for (const LevelSpec& level : games::LevelRegistry::builtin().levels()) {
    if (!slot.contains(level.game)) {
      slot[level.game] = games.size();
      games.push_back({{"game", to_string(level.game)}, {"levels", nlohmann::json::array()}});
    }
    games[slot[level.game]]["levels"].push_back(level_to_json(level));
  }
  return {{"schema_version", kMessageSchemaVersion}, {"games", games}};
}

struct WebPlayServer::Impl {
  WebPlayOptions options;
  httplib::Server server;
  std::thread listener;
  int port = -1;
  bool started = false;
  std::unique_ptr<TrajectoryWriter> writer;

  mutable std::mutex mutex;
  std::condition_variable stopped_cv;
  bool stopped = false;
  std::map<std::string, std::shared_ptr<PlaySession>> sessions;
  std::vector<EpisodeRecord> completed;
  std::uint64_t session_counter = 0;
  std::uint64_t episode_counter = 0;

  std::shared_ptr<PlaySession> find(const std::string& id) {
    std::lock_guard lock(mutex);
    const auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  struct EpisodeRunner {
    Impl* impl;
    LevelSpec level;
    SessionSeed seed;
    std::int64_t round;
    std::vector<Action> alphabet;

    void operator()(PlaySession& session, std::int64_t episode) {
      models::ModelProfile profile;
      profile.name = "human";
      profile.kind = models::BackendKind::human;
      profile.human_timeout = impl->options.step_timeout;
      models::HumanRelay relay(session, profile.human_timeout);
      EpisodeOptions opts;
      opts.round = round;
      opts.participant = session.participant();
      if (impl->options.save_frames) opts.run_dir = impl->options.output_dir;
      opts.observer = [&](const FrameEvent& e) { session.publish(episode, e); };
      try {
        EpisodeRecord record = run_episode(level, seed, profile, relay, opts);
        impl->writer->append(record);
        spdlog::info("session {} finished {} with score {}", session.id(), level.key, record.final_score);
        std::lock_guard lock(impl->mutex);
        impl->completed.push_back(std::move(record));
      } catch (const EpisodeAborted& e) {
        spdlog::info("{}; episode discarded", e.what());
      } catch (const std::exception& e) {
        spdlog::error("session {} failed: {}", session.id(), e.what());
      }
      session.finish(episode);
    }
  };

  void handle_message(const httplib::Request& req, httplib::Response& res) {
    const auto session = find(req.matches[1]);
    if (!session) return reply_error(res, 404, "unknown session");
    nlohmann::json msg;
    try {
      msg = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception&) {
      return reply_error(res, 400, "message body is not JSON");
    }
    if (!msg.is_object()) return reply_error(res, 400, "message must be a JSON object");
    std::string type = msg.value("type", std::string());
    if (type.empty()) type = msg.contains("action") ? "action" : "reset";
    if (type == "action") {
      if (!msg.contains("action") || !msg.at("action").is_string()) return reply_error(res, 400, "action must be a string");
      int status = 200;
      const std::string error = session->submit(msg.at("action").get<std::string>(), status);
      if (!error.empty()) return reply_error(res, status, error);
      return reply_json(res, 200, {{"ok", true}});
    }
    if (type != "reset") return reply_error(res, 400, fmt::format("unknown message type '{}'", type));
    std::string error;
    const LevelSpec* level = resolve_level(msg, error);
    if (level == nullptr) return reply_error(res, 400, error);
    std::uint64_t seed_value = 0;
    std::int64_t round = 0;
    {
      std::lock_guard lock(mutex);
      round = static_cast<std::int64_t>(++episode_counter);
      seed_value = derive_seed(options.seed, {static_cast<std::uint64_t>(round)});
    }
    if (msg.contains("seed")) {
      if (!msg.at("seed").is_number_unsigned()) return reply_error(res, 400, "seed must be a non-negative integer");
      seed_value = msg.at("seed").get<std::uint64_t>();
    }
    const GameSession probe = games::create_session(*level, SessionSeed{seed_value});
    EpisodeRunner runner{this, *level, SessionSeed{seed_value}, round,
                         std::vector<Action>(probe.alphabet().begin(), probe.alphabet().end())};
    const auto alphabet = action_names(runner.alphabet);
    const std::int64_t episode = session->begin_episode(*level, std::move(runner));
    reply_json(res, 200,
               {{"ok", true}, {"episode", episode}, {"level", level->key}, {"alphabet", alphabet}, {"seed", seed_value}});
  }

  void handle_frames(const httplib::Request& req, httplib::Response& res) {
    const auto session = find(req.matches[1]);
    if (!session) return reply_error(res, 404, "unknown session");
    std::int64_t after = -1;
    std::chrono::milliseconds wait{5000};
    try {
      if (req.has_param("after")) after = std::stoll(req.get_param_value("after"));
      if (req.has_param("wait_ms")) wait = std::chrono::milliseconds(std::stoll(req.get_param_value("wait_ms")));
    } catch (const std::exception&) {
      return reply_error(res, 400, "after and wait_ms must be integers");
    }
    wait = std::clamp(wait, std::chrono::milliseconds(0), kMaxWait);
    const auto frame = session->frame_after(after, wait);
    if (!frame) {
      res.status = 204;
      return;
    }
    reply_json(res, 200, frame_message_to_json(*frame));
  }

  void install_routes() {
    if (!options.static_dir.empty()) {
      if (!server.set_mount_point("/", options.static_dir.string()))
        throw ConfigError(fmt::format("static directory {} does not exist", options.static_dir.string()));
    } else {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(std::string(kPlaceholderPage), "text/html");
      });
    }
    server.Get("/api/catalog", [](const httplib::Request&, httplib::Response& res) { reply_json(res, 200, catalog_json()); });
    server.Post("/api/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      std::string participant;
      if (!req.body.empty()) {
        try {
          const auto body = nlohmann::json::parse(req.body);
          participant = body.value("participant", std::string());
        } catch (const nlohmann::json::exception&) {
          return reply_error(res, 400, "body is not JSON");
        }
      }
      std::string id;
      {
        std::lock_guard lock(mutex);
        id = fmt::format("s{:016x}", derive_seed(options.seed, {0x5e55, ++session_counter}));
        sessions[id] = std::make_shared<PlaySession>(id, participant.empty() ? id : participant);
      }
      reply_json(res, 200, {{"session", id}});
    });
    server.Post(R"(/api/sessions/([A-Za-z0-9]+)/messages)",
                [this](const httplib::Request& req, httplib::Response& res) { handle_message(req, res); });
    server.Get(R"(/api/sessions/([A-Za-z0-9]+)/frames)",
               [this](const httplib::Request& req, httplib::Response& res) { handle_frames(req, res); });
    server.Delete(R"(/api/sessions/([A-Za-z0-9]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::shared_ptr<PlaySession> session;
      {
        std::lock_guard lock(mutex);
        const auto it = sessions.find(req.matches[1]);
        if (it == sessions.end()) return reply_error(res, 404, "unknown session");
        session = it->second;
        sessions.erase(it);
      }
      session->abort_episode();
      reply_json(res, 200, {{"ok", true}});
    });
  }
};

WebPlayServer::WebPlayServer(WebPlayOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
}

WebPlayServer::~WebPlayServer() { stop(); }

int WebPlayServer::start() {
  if (impl_->started) return impl_->port;
  std::filesystem::create_directories(impl_->options.output_dir);
  impl_->writer = std::make_unique<TrajectoryWriter>(impl_->options.output_dir / kTrajectoryFile);
  impl_->install_routes();
  if (impl_->options.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(impl_->options.host);
  } else if (impl_->server.bind_to_port(impl_->options.host, impl_->options.port)) {
    impl_->port = impl_->options.port;
  } else {
    impl_->port = -1;
  }
  if (impl_->port <= 0)
    throw ConfigError(fmt::format("cannot bind {}:{}", impl_->options.host, impl_->options.port));
  impl_->listener = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->started = true;
  spdlog::info("web-play listening on http://{}:{}/", impl_->options.host, impl_->port);
  return impl_->port;
}

void WebPlayServer::stop() {
  if (!impl_ || !impl_->started) return;
  std::map<std::string, std::shared_ptr<PlaySession>> sessions;
  {
    std::lock_guard lock(impl_->mutex);
    if (impl_->stopped) return;
    impl_->stopped = true;
    sessions.swap(impl_->sessions);
  }
  for (auto& [id, session] : sessions) session->abort_episode();
  impl_->server.stop();
  if (impl_->listener.joinable()) impl_->listener.join();
  impl_->stopped_cv.notify_all();
}

void WebPlayServer::wait() {
  std::unique_lock lock(impl_->mutex);
  impl_->stopped_cv.wait(lock, [&] { return impl_->stopped; });
}

int WebPlayServer::port() const { return impl_->port; }

std::vector<EpisodeRecord> WebPlayServer::completed_episodes() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->completed;
}

std::filesystem::path WebPlayServer::trajectory_path() const { return impl_->options.output_dir / kTrajectoryFile; }

}  // namespace pixelbench::harness
