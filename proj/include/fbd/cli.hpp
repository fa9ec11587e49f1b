#pragma once

#include <iosfwd>

namespace fbd {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitCheckFailed = 1,
    kExitUsage = 2,
    kExitNonConvergence = 3,
    kExitInternal = 4,
};

/// Parses argv, runs one subcommand (pmf, extinction, moments, simulate,
/// verify) and writes its record to `out`; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fbd
