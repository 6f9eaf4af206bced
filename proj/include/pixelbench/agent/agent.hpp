#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pixelbench/engine/game.hpp"
#include "pixelbench/games/rulebook.hpp"
#include "pixelbench/models/backend.hpp"
#include "pixelbench/models/chat.hpp"

namespace pixelbench::agent {

struct AgentConfig {
  int history_frames = 3;
  games::Rulebook rulebook;

  static AgentConfig for_level(const LevelSpec& level);
};

struct HistoryEntry {
  Frame frame;
  int steps_before_current = 1;
  // Prior reply rendered as a {'observation', 'reasoning', 'action'} record.
  std::string reasoning_text;
  std::string action_info;
  // Encoded copy of `frame`, filled lazily so each frame is encoded once.
  std::vector<std::uint8_t> png;
};

struct ParsedResponse {
  std::string observation;
  std::string reasoning;
  // Unset when the reply has no in-alphabet action token.
  std::optional<Action> action;
  // The text found after the last "Action:" label, before normalization.
  std::string action_text;
  std::string raw_text;

  bool valid() const { return action.has_value(); }
};

class ValidityLedger {
 public:
  void record(bool valid) {
    ++total_;
    if (valid) ++valid_;
  }
  std::int64_t valid_actions() const { return valid_; }
  std::int64_t total_actions() const { return total_; }
  // Zero when no action was attempted.
  double valid_rate() const { return total_ == 0 ? 0.0 : static_cast<double>(valid_) / static_cast<double>(total_); }

 private:
  std::int64_t valid_ = 0;
  std::int64_t total_ = 0;
};

// Rules, then each history frame with its template sentence, then the
// current frame, the notes, and the response format. Throws ContractError
// when history holds more than config.history_frames entries.
models::ChatRequest build_prompt(const AgentConfig& config, std::span<HistoryEntry> history, const Frame& current);

ParsedResponse parse_response(std::string_view text, std::span<const Action> alphabet);

// The prior-reply record quoted back in later prompts.
std::string reasoning_record(const ParsedResponse& parsed);

// One baseline agent per episode: keeps the last k frames with the replies
// they produced and the info strings that followed.
class Agent {
 public:
  struct Turn {
    std::int64_t step_index = 0;
    std::string prompt_transcript;
    std::size_t prompt_images = 0;
    // Encoded frame the model was shown for this step.
    std::vector<std::uint8_t> frame_png;
    std::string frame_hash;
    models::ChatReply reply;
    ParsedResponse parsed;
    Action executed = Action::NONE;
    StepResult result;
  };

  explicit Agent(AgentConfig config) : config_(std::move(config)) {}

  // Prompts the backend with the session's current frame and steps the
  // session. An invalid reply is played as NONE. Backend exceptions
  // propagate with the ledger left unchanged for this turn.
  Turn act(GameSession& session, models::ModelBackend& backend);

  const AgentConfig& config() const { return config_; }
  const ValidityLedger& ledger() const { return ledger_; }
  const std::deque<HistoryEntry>& history() const { return history_; }

 private:
  AgentConfig config_;
  ValidityLedger ledger_;
  std::deque<HistoryEntry> history_;
};

}  // namespace pixelbench::agent
