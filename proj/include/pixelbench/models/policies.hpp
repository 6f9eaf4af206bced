#pragma once

#include <cstdint>
#include <string>

#include "pixelbench/core/rng.hpp"
#include "pixelbench/models/backend.hpp"
#include "pixelbench/models/oracle.hpp"

namespace pixelbench::models {

// Structured reply in the Observation / Reasoning / Action format the agent
// asks for.
std::string format_reply(std::string_view observation, std::string_view reasoning, Action action);

// Uniform choice over the session's alphabet. Replies are always well formed.
class RandomPolicy final : public ModelBackend {
 public:
  explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}

  ChatReply complete(const TurnContext& turn) override;
  Action draw(std::span<const Action> alphabet) { return alphabet[rng_.below(alphabet.size())]; }

 private:
  Rng rng_;
};

class OracleBackend final : public ModelBackend {
 public:
  ChatReply complete(const TurnContext& turn) override;

 private:
  Oracle oracle_;
};

}  // namespace pixelbench::models
