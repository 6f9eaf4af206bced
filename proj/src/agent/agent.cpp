#include "pixelbench/agent/agent.hpp"

#include <fmt/format.h>

#include "pixelbench/core/errors.hpp"
#include "pixelbench/engine/png.hpp"

namespace pixelbench::agent {
namespace {

constexpr std::string_view kHistoryIntro = "Now, I will give you some history screenshots in the game for decision making.";
constexpr std::string_view kCurrentFrame = "This screenshot represents the current step of the game.";
constexpr std::string_view kHistoryContext =
    "The last frame shows the current state of the game, while the previous frames show the character's previous "
    "movements.";
constexpr std::string_view kFormatIntro =
    "You should think step by step and respond with the following format, remember to respond with plain text "
    "without any special characters or symbols, DO NOT respond in markdown or Latex or any other format.";

std::string steps_phrase(int steps) {
  return fmt::format("{} {}", games::number_word(steps), steps == 1 ? "step" : "steps");
}

// Appends text, merging with a preceding text part so the request alternates
// cleanly between text and images.
void add_text(models::ChatRequest& request, std::string text) {
  if (!request.parts.empty() && request.parts.back().kind == models::ChatPart::Kind::text)
    request.parts.back().text += text;
  else
    request.parts.push_back(models::ChatPart::make_text(std::move(text)));
}

}  // namespace

AgentConfig AgentConfig::for_level(const LevelSpec& level) {
  return {level.history_frames, games::rulebook_for(level)};
}

models::ChatRequest build_prompt(const AgentConfig& config, std::span<HistoryEntry> history, const Frame& current) {
  if (config.history_frames < 0) throw ContractError("history_frames must be non-negative");
  if (history.size() > static_cast<std::size_t>(config.history_frames))
    throw ContractError(fmt::format("history holds {} entries but the agent keeps at most {}", history.size(),
                                    config.history_frames));
  models::ChatRequest request;
  add_text(request, config.rulebook.rules + "\n\n");
  if (!history.empty()) add_text(request, std::string(kHistoryIntro) + "\n\n");
  for (HistoryEntry& entry : history) {
    if (entry.png.empty()) entry.png = encode_png(entry.frame);
    request.parts.push_back(models::ChatPart::make_image(entry.png));
    add_text(request, fmt::format("\n\nThis screenshot is {} before the current step of the game. After this frame, "
                                  "your reasoning message was \"{}\". After the action was executed, the game info "
                                  "was \"{}\"\n\n",
                                  steps_phrase(entry.steps_before_current), entry.reasoning_text, entry.action_info));
  }
  request.parts.push_back(models::ChatPart::make_image(encode_png(current)));
  std::string tail = fmt::format("\n\n{}\n\n", kCurrentFrame);
  if (!history.empty()) tail += fmt::format("{}\n\n", kHistoryContext);
  tail += fmt::format("Important notes:\n{}\n\n", config.rulebook.notes);
  tail += fmt::format("{}\n\nResponse:\n\nObservation: ... ({})\nReasoning: ... (Think step by step and explain how "
                      "you choose the action.)\nAction: ... ({})\n",
                      kFormatIntro, config.rulebook.observation_hint, config.rulebook.action_hint);
  add_text(request, std::move(tail));
  return request;
}

Agent::Turn Agent::act(GameSession& session, models::ModelBackend& backend) {
  if (session.done()) throw StateError(fmt::format("session for {} is finished", session.level().key));
  Turn turn;
  turn.step_index = session.step_index();
  const Frame current = session.render();
  turn.frame_hash = current.hash();

  std::vector<HistoryEntry> entries(history_.begin(), history_.end());
  for (std::size_t i = 0; i < entries.size(); ++i) entries[i].steps_before_current = static_cast<int>(entries.size() - i);
  const models::ChatRequest request = build_prompt(config_, entries, current);
  turn.prompt_transcript = request.transcript();
  turn.prompt_images = request.image_count();
  turn.frame_png = request.parts[request.parts.size() - 2].png;

  turn.reply = backend.complete({session, request});
  turn.parsed = parse_response(turn.reply.text, session.alphabet());
  turn.executed = turn.parsed.action.value_or(Action::NONE);
  ledger_.record(turn.parsed.valid());
  turn.result = session.step(turn.executed);

  // Keep the encoded frames the prompt just produced.
  history_.assign(std::make_move_iterator(entries.begin()), std::make_move_iterator(entries.end()));
  if (config_.history_frames > 0) {
    HistoryEntry entry;
    entry.frame = current;
    entry.reasoning_text = reasoning_record(turn.parsed);
    entry.action_info = turn.result.info;
    entry.png = turn.frame_png;
    history_.push_back(std::move(entry));
    while (history_.size() > static_cast<std::size_t>(config_.history_frames)) history_.pop_front();
  }
  return turn;
}

}  // namespace pixelbench::agent
