#include "pixelbench/engine/game.hpp"

#include <fmt/format.h>

#include "pixelbench/core/errors.hpp"

namespace pixelbench {

std::int64_t LevelSpec::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) throw ConfigError(fmt::format("level {} has no parameter '{}'", key, name));
  return it->second;
}

GameSession::GameSession(LevelSpec level, SessionSeed seed, std::unique_ptr<Game> game)
    : level_(std::move(level)), seed_(seed), game_(std::move(game)) {}

GameSession::GameSession(const GameSession& other)
    : level_(other.level_),
      seed_(other.seed_),
      game_(other.game_->clone()),
      step_index_(other.step_index_),
      score_(other.score_),
      done_(other.done_),
      info_(other.info_) {}

GameSession& GameSession::operator=(const GameSession& other) {
  if (this != &other) *this = GameSession(other);
  return *this;
}

Transition GameSession::advance(Action action) {
  if (done_) throw StateError(fmt::format("session for {} is finished", level_.key));
  if (!contains(game_->alphabet(), action))
    throw ContractError(fmt::format("action {} is not in the {} alphabet", to_string(action), level_.key));
  Transition t = game_->advance(action);
  ++step_index_;
  // Cumulative score never decreases, whatever a game reports.
  if (t.score < score_) t.score = score_;
  score_ = t.score;
  if (!t.done && step_index_ >= level_.max_steps) {
    t.done = true;
    t.info = kInfoStepLimit;
  }
  done_ = t.done;
  info_ = t.info;
  return t;
}

StepResult GameSession::step(Action action) {
  advance(action);
  return current();
}

Frame GameSession::render() const {
  Frame frame(kFrameSize, kFrameSize, step_index_);
  Canvas canvas(frame);
  game_->draw(canvas);
  return frame;
}

StepResult GameSession::current() const {
  return StepResult{render(), static_cast<double>(score_), done_, info_};
}

}  // namespace pixelbench
