#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "pixelbench/engine/frame.hpp"
#include "pixelbench/engine/level.hpp"
#include "pixelbench/engine/types.hpp"

namespace pixelbench {

struct Transition {
  std::int64_t score = 0;  // cumulative, game-specific units
  bool done = false;
  std::string info;
};

// One game's simulation state. Implementations hold integer state only and
// must be deterministic functions of (level, seed, action sequence).
class Game {
 public:
  virtual ~Game() = default;

  virtual GameId id() const = 0;
  virtual std::span<const Action> alphabet() const = 0;
  // Advances one fixed step. `action` is already validated against alphabet().
  virtual Transition advance(Action action) = 0;
  virtual void draw(Canvas& canvas) const = 0;
  virtual std::unique_ptr<Game> clone() const = 0;
};

struct StepResult {
  Frame frame;
  double score = 0.0;
  bool done = false;
  std::string info;
};

// A running game instance: owns the game state and enforces the lifecycle
// (step cap, no stepping after done, alphabet membership, score monotonicity).
class GameSession {
 public:
  GameSession(LevelSpec level, SessionSeed seed, std::unique_ptr<Game> game);

  GameSession(const GameSession& other);
  GameSession& operator=(const GameSession& other);
  GameSession(GameSession&&) noexcept = default;
  GameSession& operator=(GameSession&&) noexcept = default;

  const LevelSpec& level() const { return level_; }
  SessionSeed seed() const { return seed_; }
  std::span<const Action> alphabet() const { return game_->alphabet(); }
  std::int64_t step_index() const { return step_index_; }
  std::int64_t score() const { return score_; }
  bool done() const { return done_; }
  const std::string& info() const { return info_; }

  // Throws StateError when done, ContractError for a token outside the
  // session's alphabet.
  StepResult step(Action action);
  // Same validation as step() without rendering the resulting frame.
  Transition advance(Action action);

  Frame render() const;
  StepResult current() const;

  // Read-only view of the simulation, for perfect-information oracles.
  const Game& state() const { return *game_; }

 private:
  LevelSpec level_;
  SessionSeed seed_;
  std::unique_ptr<Game> game_;
  std::int64_t step_index_ = 0;
  std::int64_t score_ = 0;
  bool done_ = false;
  std::string info_ = "Game is running.";
};

inline constexpr const char* kInfoRunning = "Game is running.";
inline constexpr const char* kInfoStepLimit = "Reached the step limit.";

}  // namespace pixelbench
