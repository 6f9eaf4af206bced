#include "pixelbench/models/policies.hpp"

#include <fmt/format.h>

namespace pixelbench::models {

std::string format_reply(std::string_view observation, std::string_view reasoning, Action action) {
  return fmt::format("Observation: {}\nReasoning: {}\nAction: {}", observation, reasoning, to_string(action));
}

ChatReply RandomPolicy::complete(const TurnContext& turn) {
  const Action a = draw(turn.session.alphabet());
  return {format_reply("Random policy; the frame is not inspected.", "Uniform choice over the action set.", a), {}};
}

ChatReply OracleBackend::complete(const TurnContext& turn) {
  const Action a = oracle_.decide(turn.session);
  return {format_reply("Scripted oracle reading the simulation state.", "Planned move toward the level goal.", a), {}};
}

}  // namespace pixelbench::models
