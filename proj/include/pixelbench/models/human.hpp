#pragma once

#include <chrono>
#include <optional>

#include "pixelbench/models/backend.hpp"

namespace pixelbench::models {

// Source of a live participant's actions, implemented by the web-play
// server's relay sessions.
class HumanChannel {
 public:
  virtual ~HumanChannel() = default;
  // Blocks until the participant submits an action; nullopt when `timeout`
  // elapses first. Throws EpisodeAborted when the participant is gone.
  virtual std::optional<Action> next_action(std::chrono::milliseconds timeout) = 0;
};

// Turn-paced relay: a lapsed timeout plays NONE, which still counts as a
// valid reply.
class HumanRelay final : public ModelBackend {
 public:
  HumanRelay(HumanChannel& channel, std::chrono::milliseconds timeout) : channel_(channel), timeout_(timeout) {}

  ChatReply complete(const TurnContext& turn) override;

 private:
  HumanChannel& channel_;
  std::chrono::milliseconds timeout_;
};

}  // namespace pixelbench::models
