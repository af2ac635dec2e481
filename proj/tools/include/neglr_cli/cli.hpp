#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace neglr::cli {

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

/// Runs the command line `args` (without the program name). Output that
/// would go to stdout/stderr goes to `out`/`err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace neglr::cli
