#include <doctest.h>

#include <chrono>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "pixelbench/core/digest.hpp"
#include "pixelbench/engine/png.hpp"
#include "pixelbench/games/catalog.hpp"
#include "pixelbench/harness/trajectory.hpp"
#include "pixelbench/harness/webplay.hpp"
#include "pixelbench/models/oracle.hpp"
#include "temp_dir.hpp"

using namespace pixelbench;
using namespace pixelbench::harness;
using nlohmann::json;

namespace {

struct Client {
  explicit Client(int port) : http("127.0.0.1", port) { http.set_read_timeout(10, 0); }

  httplib::Result post(const std::string& path, const json& body) {
    return http.Post(path, body.dump(), "application/json");
  }

  std::string open_session(const std::string& participant) {
    auto res = post("/api/sessions", {{"participant", participant}});
    REQUIRE(res);
    REQUIRE(res->status == 200);
    return json::parse(res->body).at("session").get<std::string>();
  }

  httplib::Result send(const std::string& session, const json& msg) {
    return post("/api/sessions/" + session + "/messages", msg);
  }

  // Long-polls for the first frame after `after`; nullopt on 204.
  std::optional<FrameMessage> frame(const std::string& session, std::int64_t after, int wait_ms = 5000) {
    auto res = http.Get(fmt::format("/api/sessions/{}/frames?after={}&wait_ms={}", session, after, wait_ms));
    REQUIRE(res);
    if (res->status == 204) return std::nullopt;
    REQUIRE(res->status == 200);
    return frame_message_from_json(json::parse(res->body));
  }

  httplib::Client http;
};

std::vector<std::uint8_t> png_of(const GameSession& s) { return encode_png(s.render()); }

void wait_for_completed(const WebPlayServer& server, std::size_t n) {
  for (int i = 0; i < 500 && server.completed_episodes().size() < n; ++i)
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
}

WebPlayOptions options_in(const testing::TempDir& dir) {
  WebPlayOptions o;
  o.output_dir = dir.path();
  o.step_timeout = std::chrono::seconds(20);
  return o;
}

}  // namespace

TEST_CASE("web play serves the catalog") {
  testing::TempDir dir("webplay-catalog");
  WebPlayServer server(options_in(dir));
  Client client(server.start());
  auto res = client.http.Get("/api/catalog");
  REQUIRE(res);
  CHECK(res->status == 200);
  const json catalog = json::parse(res->body);
  std::size_t levels = 0;
  for (const auto& g : catalog.at("games")) levels += g.at("levels").size();
  CHECK(levels == 33);
  CHECK(catalog.at("games").size() == 5);
  res = client.http.Get("/");
  REQUIRE(res);
  CHECK(res->status == 200);
}

TEST_CASE("a full human episode over the message channel") {
  testing::TempDir dir("webplay-episode");
  WebPlayServer server(options_in(dir));
  Client client(server.start());
  const std::string sid = client.open_session("p1");

  // Nothing runs before a reset.
  CHECK_FALSE(client.frame(sid, -1, 0));
  auto res = client.send(sid, {{"type", "action"}, {"action", "FLAP"}});
  REQUIRE(res);
  CHECK(res->status == 409);

  res = client.send(sid, {{"type", "reset"}, {"game", "flappybird"}, {"level", 1}, {"seed", 5}});
  REQUIRE(res);
  REQUIRE(res->status == 200);
  const json reset = json::parse(res->body);
  CHECK(reset.at("level") == "flappybird-1");
  CHECK(reset.at("alphabet") == json::array({"FLAP", "NONE"}));

  const LevelSpec& level = games::LevelRegistry::builtin().get("flappybird-1");
  GameSession mirror = games::create_session(level, SessionSeed{5});
  auto first = client.frame(sid, -1);
  REQUIRE(first);
  CHECK(first->step == 0);
  CHECK(first->session == sid);
  CHECK(base64_decode(first->png_base64) == png_of(mirror));

  std::vector<Action> played;
  std::int64_t step = 0;
  bool rejected_once = false;
  const auto start = std::chrono::steady_clock::now();
  while (!mirror.done()) {
    if (!rejected_once && step == 3) {
      // An out-of-alphabet action is refused and the step does not advance.
      res = client.send(sid, {{"type", "action"}, {"action", "UP"}});
      REQUIRE(res);
      CHECK(res->status == 400);
      CHECK_FALSE(client.frame(sid, step, 150));
      rejected_once = true;
    }
    const Action a = models::flappy_oracle(mirror);
    res = client.send(sid, {{"type", "action"}, {"action", std::string(to_string(a))}});
    REQUIRE(res);
    REQUIRE(res->status == 200);
    const StepResult expected = mirror.step(a);
    played.push_back(a);
    const auto f = client.frame(sid, step);
    REQUIRE(f);
    ++step;
    CHECK(f->step == step);
    CHECK(f->score == expected.score);
    CHECK(f->done == expected.done);
    CHECK(f->info == expected.info);
    CHECK(base64_decode(f->png_base64) == encode_png(expected.frame));
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double fps = static_cast<double>(step) / elapsed;
  INFO("frames per second: " << fps);
  CHECK(fps >= 5.0);
  CHECK(mirror.current().score == 10.0);

  wait_for_completed(server, 1);
  const auto completed = server.completed_episodes();
  REQUIRE(completed.size() == 1);
  const EpisodeRecord& e = completed[0];
  CHECK(e.participant == "p1");
  CHECK(e.backend == "human");
  CHECK(e.level == "flappybird-1");
  CHECK(e.final_score == 10.0);
  REQUIRE(e.steps.size() == played.size());
  for (std::size_t i = 0; i < played.size(); ++i) CHECK(e.steps[i].executed == played[i]);
  CHECK(verify_episode(e).ok);

  const auto on_disk = read_trajectories(server.trajectory_path());
  REQUIRE(on_disk.size() == 1);
  CHECK(verify_episode(on_disk[0]).ok);
  CHECK(std::filesystem::exists(dir / e.steps[0].frame_file));
}

TEST_CASE("resets and disconnects discard the running episode") {
  testing::TempDir dir("webplay-discard");
  WebPlayServer server(options_in(dir));
  Client client(server.start());
  const std::string sid = client.open_session("p2");

  auto res = client.send(sid, {{"type", "reset"}, {"level", "pong-0"}, {"seed", 1}});
  REQUIRE(res);
  REQUIRE(res->status == 200);
  REQUIRE(client.frame(sid, -1));
  REQUIRE(client.send(sid, {{"type", "action"}, {"action", "UP"}})->status == 200);
  REQUIRE(client.frame(sid, 0));

  // A second reset starts over at step 0 on a new episode.
  res = client.send(sid, {{"type", "reset"}, {"level", "race-1"}, {"seed", 2}});
  REQUIRE(res);
  const json reset = json::parse(res->body);
  const auto fresh = client.frame(sid, -1);
  REQUIRE(fresh);
  CHECK(fresh->step == 0);
  CHECK(fresh->episode == reset.at("episode").get<std::int64_t>());
  CHECK(base64_decode(fresh->png_base64) == png_of(games::create_session("race-1", SessionSeed{2})));

  res = client.http.Delete("/api/sessions/" + sid);
  REQUIRE(res);
  CHECK(res->status == 200);
  res = client.send(sid, {{"type", "action"}, {"action", "UP"}});
  REQUIRE(res);
  CHECK(res->status == 404);
  CHECK(server.completed_episodes().empty());
  const bool nothing_recorded =
      !std::filesystem::exists(server.trajectory_path()) || read_trajectories(server.trajectory_path()).empty();
  CHECK(nothing_recorded);
}

TEST_CASE("malformed messages are rejected") {
  testing::TempDir dir("webplay-errors");
  WebPlayServer server(options_in(dir));
  Client client(server.start());
  const std::string sid = client.open_session("p3");
  auto status = [&](const std::string& body) {
    auto res = client.http.Post("/api/sessions/" + sid + "/messages", body, "application/json");
    REQUIRE(res);
    return res->status;
  };
  CHECK(status("not json") == 400);
  CHECK(status("[1]") == 400);
  CHECK(status(R"({"type":"jump"})") == 400);
  CHECK(status(R"({"type":"reset"})") == 400);
  CHECK(status(R"({"type":"reset","level":"race-99"})") == 400);
  CHECK(status(R"({"type":"reset","game":"chess","level":1})") == 400);
  CHECK(status(R"({"type":"reset","game":"pong","level":7})") == 400);
  CHECK(status(R"({"type":"reset","level":"pong-1","seed":-4})") == 400);
  CHECK(status(R"({"type":"action","action":3})") == 400);
  auto res = client.http.Get("/api/sessions/nosuch/frames");
  REQUIRE(res);
  CHECK(res->status == 404);
  res = client.http.Get("/api/sessions/" + sid + "/frames?after=x");
  REQUIRE(res);
  CHECK(res->status == 400);
}

TEST_CASE("frame messages round-trip") {
  const FrameMessage m{"abc", 2, 7, "AAAA", 3.5, true, "Crashed."};
  const json j = frame_message_to_json(m);
  CHECK(j.at("type") == "frame");
  CHECK(j.at("schema_version") == kMessageSchemaVersion);
  const FrameMessage back = frame_message_from_json(j);
  CHECK(back.step == 7);
  CHECK(back.info == "Crashed.");
  CHECK_THROWS(frame_message_from_json(json{{"session", "abc"}}));
}
