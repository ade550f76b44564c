#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace merkle_falsify {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // verification mismatch, >5 sigma cell, I/O error
inline constexpr int kExitUsage = 2;    // bad flags, malformed input

// Entry point of the merkle-falsify tool; `args` excludes the program name.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace merkle_falsify
