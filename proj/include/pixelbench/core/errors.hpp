#pragma once

#include <stdexcept>
#include <string>

namespace pixelbench {

// Bad or unknown configuration: unregistered level, malformed config file,
// missing API key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation called in a state that does not permit it, e.g. stepping a
// finished session.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Caller violated a precondition: foreign action token, oversized history,
// malformed permutation.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Remote backend failed after exhausting its retry budget.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Remote backend answered, but not in the expected shape.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A relayed episode lost its driver (human disconnected, session reset).
class EpisodeAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pixelbench
