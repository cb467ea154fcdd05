#pragma once

#include <iosfwd>

namespace wavenet::cli {

enum ExitCode : int { kOk = 0, kUnstable = 1, kUsage = 2 };

// Runs one subcommand. Summaries go to `out`, diagnostics to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wavenet::cli
