#include "pixelbench/models/oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "pixelbench/core/rng.hpp"
#include "pixelbench/games/common.hpp"
#include "pixelbench/games/flappy.hpp"
#include "pixelbench/games/mario.hpp"
#include "pixelbench/games/pong.hpp"
#include "pixelbench/games/race.hpp"

namespace pixelbench::models {
namespace {

using games::floor_div;

template <typename T>
const T& game_as(const GameSession& session) {
  return dynamic_cast<const T&>(session.state());
}

std::uint64_t hash_fields(std::initializer_list<std::int64_t> fields) {
  std::uint64_t h = 0x243F6A8885A308D3ULL;
  for (std::int64_t f : fields) h = mix64(h ^ static_cast<std::uint64_t>(f));
  return h;
}

constexpr int kFlappyLookahead = 60;

// True when some flappy action sequence keeps `game` alive for `depth` more
// steps or passes the final pipe first. Pipes move on a fixed schedule, so
// failures are memoized on (depth, bird_y, bird_vy).
bool survives(const games::FlappyGame& game, int depth, std::unordered_set<std::uint64_t>& failed) {
  if (depth == 0) return true;
  const std::uint64_t key = hash_fields({depth, game.state().bird_y, game.state().bird_vy});
  if (failed.count(key)) return false;
  for (Action a : games::kFlappyAlphabet) {
    games::FlappyGame next = game;
    const Transition t = next.advance(a);
    if (t.done) {
      if (t.score >= next.rules().score_cap) return true;
      continue;
    }
    if (survives(next, depth - 1, failed)) return true;
  }
  failed.insert(key);
  return false;
}

}  // namespace

Action race_map_oracle(const GameSession& session) {
  const auto& race = game_as<games::RaceGame>(session);
  const auto& st = race.state();
  const games::RaceGrid grid(race.rules(), st.obstacles);
  const auto car = grid.cell_of(st.car);
  const auto trophy = grid.cell_of(st.trophy);
  if (!car || !trophy) return Action::NONE;
  const auto dist = grid.distances_from(trophy->first, trophy->second);
  const int here = dist[static_cast<std::size_t>(grid.index(car->first, car->second))];
  if (here <= 0) return Action::NONE;
  struct Move {
    int dc, dr;
    Action action;
  };
  constexpr Move kMoves[] = {{0, -1, Action::UP}, {0, 1, Action::DOWN}, {-1, 0, Action::LEFT}, {1, 0, Action::RIGHT}};
  for (const Move& m : kMoves) {
    const int c = car->first + m.dc;
    const int r = car->second + m.dr;
    if (grid.free(c, r) && dist[static_cast<std::size_t>(grid.index(c, r))] == here - 1) return m.action;
  }
  return Action::NONE;
}

Action flappy_oracle(const GameSession& session) {
  const auto& flappy = game_as<games::FlappyGame>(session);
  const auto& st = flappy.state();
  const games::Pipe* pipe = flappy.next_pipe();
  const std::int64_t target = pipe ? pipe->gap_center_y : games::kFlappyGroundY / 2;
  const std::int64_t next_center = st.bird_y + st.bird_vy + games::kFlappyGravity + games::kFlappyBirdSize / 2;
  const Action preferred = next_center > target ? Action::FLAP : Action::NONE;
  const Action other = preferred == Action::FLAP ? Action::NONE : Action::FLAP;
  // The centering rule alone clips pipe edges when consecutive gaps shift;
  // a short survival lookahead overrides it in those cases.
  auto safe_after = [&](Action first) {
    games::FlappyGame game = flappy;
    const Transition t = game.advance(first);
    if (t.done) return t.score >= flappy.rules().score_cap;
    std::unordered_set<std::uint64_t> failed;
    return survives(game, kFlappyLookahead, failed);
  };
  if (safe_after(preferred) || !safe_after(other)) return preferred;
  return other;
}

Action pong_oracle(const GameSession& session) {
  const auto& pong = game_as<games::PongGame>(session);
  const auto& st = pong.state();
  const std::int64_t target = pong.predict_intercept_y() + games::kBallSize / 2;
  const std::int64_t center = st.paddle_y + st.paddle_height / 2;
  const std::int64_t slack = pong.rules().paddle_stride_px / 2;
  if (target < center - slack) return Action::UP;
  if (target > center + slack) return Action::DOWN;
  return Action::NONE;
}

std::vector<Action> beam_plan(const Game& start, std::int64_t steps_taken, std::int64_t max_steps,
                              const std::function<std::int64_t(const Game&)>& heuristic,
                              const std::function<std::uint64_t(const Game&)>& key, BeamOptions options) {
  struct Node {
    std::unique_ptr<Game> game;
    std::int64_t parent;
    Action action;
    std::int64_t score;
  };
  std::vector<Node> arena;
  arena.push_back({start.clone(), -1, Action::NONE, 0});
  std::vector<std::int64_t> beam{0};
  std::int64_t best = -1;
  std::int64_t best_score = -1;
  const auto alphabet = start.alphabet();

  for (std::int64_t step = steps_taken; step < max_steps && !beam.empty(); ++step) {
    std::vector<std::pair<std::int64_t, std::int64_t>> ranked;  // (heuristic, node)
    std::unordered_set<std::uint64_t> seen;
    for (std::int64_t parent : beam) {
      for (Action a : alphabet) {
        auto game = arena[static_cast<std::size_t>(parent)].game->clone();
        const Transition t = game->advance(a);
        const bool capped = step + 1 >= max_steps;
        if (t.done || capped) {
          // Finished: keep only if strictly better (earlier finds are shorter).
          if (t.score > best_score) {
            arena.push_back({nullptr, parent, a, t.score});
            best = static_cast<std::int64_t>(arena.size()) - 1;
            best_score = t.score;
          }
          continue;
        }
        if (!seen.insert(key(*game)).second) continue;
        const std::int64_t h = heuristic(*game);
        arena.push_back({std::move(game), parent, a, t.score});
        ranked.emplace_back(h, static_cast<std::int64_t>(arena.size()) - 1);
      }
      // Interior nodes are no longer needed once expanded.
      if (parent != 0) arena[static_cast<std::size_t>(parent)].game.reset();
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    if (ranked.size() > options.width) ranked.resize(options.width);
    beam.clear();
    for (const auto& r : ranked) beam.push_back(r.second);
  }

  std::vector<Action> plan;
  for (std::int64_t n = best; n > 0; n = arena[static_cast<std::size_t>(n)].parent)
    plan.push_back(arena[static_cast<std::size_t>(n)].action);
  std::reverse(plan.begin(), plan.end());
  return plan;
}

std::vector<Action> plan_race_first_person(const GameSession& session, BeamOptions options) {
  const auto& race = game_as<games::RaceGame>(session);
  const auto& rules = race.rules();
  // Distance field on a coarse lattice of car-center positions, seeded at
  // every position whose footprint touches the trophy.
  constexpr std::int64_t kCell = 4;
  const std::int64_t cols = games::kRaceArenaWidth / kCell;
  const std::int64_t rows = games::kRaceArenaHeight / kCell;
  std::vector<int> dist(static_cast<std::size_t>(cols * rows), -1);
  std::deque<std::int64_t> queue;
  const std::int64_t half = rules.car_px / 2;
  auto footprint = [&](std::int64_t c, std::int64_t r) {
    return Rect{c * kCell + kCell / 2 - half, r * kCell + kCell / 2 - half, rules.car_px, rules.car_px};
  };
  for (std::int64_t r = 0; r < rows; ++r) {
    for (std::int64_t c = 0; c < cols; ++c) {
      const Rect f = footprint(c, r);
      if (!race.blocked(f) && f.overlaps(race.trophy_rect())) {
        dist[static_cast<std::size_t>(r * cols + c)] = 0;
        queue.push_back(r * cols + c);
      }
    }
  }
  while (!queue.empty()) {
    const std::int64_t cell = queue.front();
    queue.pop_front();
    const std::int64_t c = cell % cols;
    const std::int64_t r = cell / cols;
    for (std::int64_t dr = -1; dr <= 1; ++dr) {
      for (std::int64_t dc = -1; dc <= 1; ++dc) {
        const std::int64_t nc = c + dc;
        const std::int64_t nr = r + dr;
        if (nc < 0 || nr < 0 || nc >= cols || nr >= rows) continue;
        int& slot = dist[static_cast<std::size_t>(nr * cols + nc)];
        if (slot >= 0 || race.blocked(footprint(nc, nr))) continue;
        slot = dist[static_cast<std::size_t>(cell)] + 1;
        queue.push_back(nr * cols + nc);
      }
    }
  }
  auto heuristic = [&](const Game& g) -> std::int64_t {
    const auto& st = static_cast<const games::RaceGame&>(g).state();
    const std::int64_t c = std::clamp<std::int64_t>(floor_div(st.car.x, games::kFixed * kCell), 0, cols - 1);
    const std::int64_t r = std::clamp<std::int64_t>(floor_div(st.car.y, games::kFixed * kCell), 0, rows - 1);
    const int d = dist[static_cast<std::size_t>(r * cols + c)];
    return d < 0 ? -1000000 : -static_cast<std::int64_t>(d);
  };
  auto key = [](const Game& g) {
    const auto& st = static_cast<const games::RaceGame&>(g).state();
    return hash_fields({st.car.x, st.car.y, st.heading, st.speed});
  };
  return beam_plan(race, session.step_index(), session.level().max_steps, heuristic, key, options);
}

std::vector<Action> plan_mario(const GameSession& session, BeamOptions options) {
  const auto& mario = game_as<games::MarioGame>(session);
  auto heuristic = [](const Game& g) -> std::int64_t {
    const auto& st = static_cast<const games::MarioGame&>(g).state();
    // Rightward progress first; among equals prefer standing on something.
    return st.player.x * 4 + (st.grounded ? 2 : 0) - (st.player.y > games::kMarioGroundY ? 1 : 0);
  };
  auto key = [](const Game& g) {
    const auto& st = static_cast<const games::MarioGame&>(g).state();
    return hash_fields({st.player.x, st.player.y, st.player_vy, st.grounded ? 1 : 0});
  };
  return beam_plan(mario, session.step_index(), session.level().max_steps, heuristic, key, options);
}

std::optional<std::vector<Action>> plan_tempest(const games::TempestState& state, const games::TempestRules& rules) {
  // Order tried at each node; NONE first keeps plans readable.
  constexpr Action kOrder[] = {Action::NONE, Action::JUMP, Action::SLIDE, Action::LEFT, Action::RIGHT, Action::DASH};
  const games::TempestState original = state;
  games::TempestState scratch = state;
  std::unordered_map<std::uint64_t, bool> dead_end;
  std::vector<Action> path;

  auto node_key = [](const games::TempestState& s) {
    return hash_fields({s.distance, s.lane, static_cast<std::int64_t>(s.mode), s.mode_remaining});
  };
  std::function<bool(const games::TempestState&)> search = [&](const games::TempestState& s) -> bool {
    if (s.distance >= rules.track_length_slots) return true;
    const std::uint64_t k = node_key(s);
    if (dead_end.count(k)) return false;
    for (Action a : kOrder) {
      scratch.lane = s.lane;
      scratch.mode = s.mode;
      scratch.mode_remaining = s.mode_remaining;
      scratch.distance = s.distance;
      // Restore any enemy a previous branch eliminated ahead of this node.
      for (std::int64_t d = s.distance + 1; d <= s.distance + 2 && d < static_cast<std::int64_t>(original.track.size()); ++d)
        scratch.track[static_cast<std::size_t>(d)] = original.track[static_cast<std::size_t>(d)];
      if (games::apply_runner_action(scratch, rules, a).dead) continue;
      games::TempestState next;
      next.lane = scratch.lane;
      next.mode = scratch.mode;
      next.mode_remaining = scratch.mode_remaining;
      next.distance = scratch.distance;
      path.push_back(a);
      if (search(next)) return true;
      path.pop_back();
    }
    dead_end.emplace(k, true);
    return false;
  };
  games::TempestState root;
  root.lane = state.lane;
  root.mode = state.mode;
  root.mode_remaining = state.mode_remaining;
  root.distance = state.distance;
  if (!search(root)) return std::nullopt;
  return path;
}

Action Oracle::decide(const GameSession& session) {
  switch (session.level().game) {
    case GameId::race:
      if (session.level().perspective == Perspective::map_view) return race_map_oracle(session);
      break;
    case GameId::flappybird: return flappy_oracle(session);
    case GameId::pong: return pong_oracle(session);
    default: break;
  }
  const bool on_plan = plan_origin_ >= 0 && session.step_index() == plan_origin_ + static_cast<std::int64_t>(cursor_);
  if (!on_plan) {
    cursor_ = 0;
    plan_origin_ = session.step_index();
    const auto& level = session.level();
    if (level.game == GameId::race) {
      plan_ = plan_race_first_person(session);
    } else if (level.game == GameId::supermario) {
      if (session.step_index() == 0 && !level.geometry.oracle_tape.empty())
        plan_ = level.geometry.oracle_tape;
      else
        plan_ = plan_mario(session);
    } else {
      const auto& tempest = game_as<games::TempestGame>(session);
      plan_ = plan_tempest(tempest.state(), tempest.rules()).value_or(std::vector<Action>{});
    }
  }
  if (cursor_ >= plan_.size()) return Action::NONE;
  return plan_[cursor_++];
}

}  // namespace pixelbench::models
