#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pixelbench::models {

// One element of a multimodal prompt: either text or an encoded PNG.
struct ChatPart {
  enum class Kind { text, image };

  Kind kind = Kind::text;
  std::string text;
  std::vector<std::uint8_t> png;

  static ChatPart make_text(std::string text) { return {Kind::text, std::move(text), {}}; }
  static ChatPart make_image(std::vector<std::uint8_t> png) { return {Kind::image, {}, std::move(png)}; }
};

struct ChatRequest {
  std::vector<ChatPart> parts;

  std::size_t image_count() const;
  // Text of the prompt with each image replaced by "<image>", for logs.
  std::string transcript() const;
};

struct ChatUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  int attempts = 1;
};

struct ChatReply {
  std::string text;
  ChatUsage usage;
};

}  // namespace pixelbench::models
