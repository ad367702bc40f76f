#pragma once

#include <string>
#include <vector>

namespace shapeflow::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kBadArgs = 2, kIoError = 3, kNumericalAbort = 4 };

/// Parses argv and runs the selected subcommand; returns the process exit code.
int run(int argc, char** argv);
/// Convenience overload for tests: args exclude the program name.
int run(const std::vector<std::string>& args);

}  // namespace shapeflow::cli
