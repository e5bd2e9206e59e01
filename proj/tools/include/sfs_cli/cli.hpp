#pragma once

#include <iosfwd>

namespace sfs::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kFailure = 2 };

/// Parses argv (argv[0] is the program name) and runs one subcommand.
/// Diagnostics go to `err` as a single line; reports go to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sfs::cli
