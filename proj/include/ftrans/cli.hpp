#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ftrans {

/// Exit codes: 0 success, 1 usage/configuration error, 2 violated mathematical invariant.
enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_invariant = 2 };

/// Runs one command line (without the program name). The primary artifact goes to
/// `--output` (default "-", i.e. `out`); diagnostics go to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ftrans
