#pragma once

#include <string>
#include <vector>

namespace qintent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitRemote = 3;

/// Entry point for the `qintent` binary. Subcommands: label, classify-llm,
/// sample, split, select-hc, assemble, eval, hybrid, bench, run.
int dispatch(int argc, const char* const* argv);
/// `args[0]` is the program name.
int dispatch(const std::vector<std::string>& args);

}  // namespace qintent::cli
