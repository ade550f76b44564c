#pragma once

#include <stdexcept>

namespace merkle_falsify {

// Invalid parameters for a hash or experiment (e.g. bit length out of range).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A call that violates an operation's preconditions (mismatched digest
// widths, out-of-range leaf index, malformed serialized input).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace merkle_falsify
