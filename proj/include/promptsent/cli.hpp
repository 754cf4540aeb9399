#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace promptsent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // unexpected internal error
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitCheckpoint = 4;

/// Runs one command: train, eval, predict, explain or convert. `args` holds
/// everything after the program name. Structured output goes to `out`,
/// diagnostics to `err`; predict/explain read sentences from `in` unless
/// --input is given.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace promptsent::cli
