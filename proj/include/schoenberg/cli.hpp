#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace schoenberg {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes shared by every command.
enum ExitCode : int { exit_ok = 0, exit_input_error = 1, exit_not_converged = 2 };

/// Runs the command line `args` (program name excluded). Results go to
/// `out` unless --output names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace schoenberg
