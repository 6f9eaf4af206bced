#include <algorithm>
#include <cctype>
#include <sstream>

#include "pixelbench/agent/agent.hpp"

namespace pixelbench::agent {
namespace {

bool is_markup(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '_' || c == '#' || c == '>' || c == '`' ||
         c == '-' || c == '~';
}

bool is_wrapper(char c) {
  return is_markup(c) || c == '"' || c == '\'' || c == '.' || c == ',' || c == ';' || c == ':' || c == '!' ||
         c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' || c == '<' || c == '>';
}

std::string_view trim_if(std::string_view s, bool (*pred)(char)) {
  while (!s.empty() && pred(s.front())) s.remove_prefix(1);
  while (!s.empty() && pred(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view trim_space(std::string_view s) {
  return trim_if(s, [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

enum class Label { none, observation, reasoning, action };

// Recognizes "Observation:", "**Reasoning:**", "## action: ..." and the like.
// On a match, `rest` receives the text after the colon.
Label classify(std::string_view line, std::string_view& rest) {
  std::string_view s = line;
  while (!s.empty() && is_markup(s.front())) s.remove_prefix(1);
  struct Name {
    std::string_view word;
    Label label;
  };
  constexpr Name kNames[] = {{"observation", Label::observation}, {"reasoning", Label::reasoning},
                             {"action", Label::action}};
  for (const Name& n : kNames) {
    if (s.size() < n.word.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < n.word.size(); ++i)
      if (std::tolower(static_cast<unsigned char>(s[i])) != n.word[i]) same = false;
    if (!same) continue;
    std::string_view after = s.substr(n.word.size());
    // Allow markup between the word and the colon: "**Action**: JUMP".
    while (!after.empty() && (after.front() == '*' || after.front() == '_' || after.front() == ' ')) after.remove_prefix(1);
    if (after.empty() || after.front() != ':') continue;
    rest = after.substr(1);
    return n.label;
  }
  return Label::none;
}

std::string normalize_token(std::string_view text) {
  const std::string_view core = trim_if(text, is_wrapper);
  std::string out;
  bool gap = false;
  for (char c : core) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '-') {
      gap = true;
      continue;
    }
    if (gap && !out.empty()) out += '_';
    gap = false;
    out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

ParsedResponse parse_response(std::string_view text, std::span<const Action> alphabet) {
  ParsedResponse out;
  out.raw_text = std::string(text);

  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start <= text.size();) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }

  Label current = Label::none;
  std::string* section = nullptr;
  std::optional<std::size_t> action_line;
  std::string_view action_rest;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view rest;
    const Label label = classify(lines[i], rest);
    if (label != Label::none) {
      current = label;
      if (label == Label::observation) section = &out.observation;
      if (label == Label::reasoning) section = &out.reasoning;
      if (label == Label::action) {
        section = nullptr;
        action_line = i;
        action_rest = rest;
        continue;
      }
      section->assign(trim_space(trim_if(rest, is_markup)));
      continue;
    }
    if (section != nullptr && current != Label::action) {
      const std::string_view extra = trim_space(lines[i]);
      if (extra.empty()) continue;
      if (!section->empty()) *section += ' ';
      *section += extra;
    }
  }

  if (!action_line) return out;
  std::string_view candidate = trim_space(action_rest);
  if (trim_if(candidate, is_wrapper).empty()) {
    // "Action:" alone on its line; the token may sit on the next line.
    for (std::size_t j = *action_line + 1; j < lines.size(); ++j) {
      if (!trim_space(lines[j]).empty()) {
        candidate = trim_space(lines[j]);
        break;
      }
    }
  }
  out.action_text = std::string(candidate);
  const std::string token = normalize_token(candidate);
  const std::optional<Action> parsed = parse_action(token);
  if (parsed && contains(alphabet, *parsed)) out.action = parsed;
  return out;
}

std::string reasoning_record(const ParsedResponse& parsed) {
  auto quote = [](std::string_view s) {
    std::string q;
    for (char c : s) {
      if (c == '\\' || c == '\'') q += '\\';
      q += c == '\n' ? ' ' : c;
    }
    return q;
  };
  const std::string action = parsed.action ? std::string(to_string(*parsed.action)) : normalize_token(parsed.action_text);
  std::ostringstream out;
  out << "{'observation': '" << quote(parsed.observation) << "', 'reasoning': '" << quote(parsed.reasoning)
      << "', 'action': '" << quote(action) << "'}";
  return out.str();
}

}  // namespace pixelbench::agent
