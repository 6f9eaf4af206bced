#include "pixelbench/models/human.hpp"

#include "pixelbench/models/policies.hpp"

namespace pixelbench::models {

ChatReply HumanRelay::complete(const TurnContext&) {
  const std::optional<Action> choice = channel_.next_action(timeout_);
  if (!choice) return {format_reply("Human participant.", "No input before the step timeout.", Action::NONE), {}};
  return {format_reply("Human participant.", "Human input.", *choice), {}};
}

}  // namespace pixelbench::models
