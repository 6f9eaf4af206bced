#include "pixelbench/models/chat.hpp"

namespace pixelbench::models {

std::size_t ChatRequest::image_count() const {
  std::size_t n = 0;
  for (const ChatPart& p : parts)
    if (p.kind == ChatPart::Kind::image) ++n;
  return n;
}

std::string ChatRequest::transcript() const {
  std::string out;
  for (const ChatPart& p : parts) {
    if (p.kind == ChatPart::Kind::image)
      out += "<image>\n";
    else
      out += p.text;
  }
  return out;
}

}  // namespace pixelbench::models
