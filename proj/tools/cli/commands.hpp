#pragma once

#include <iosfwd>

namespace rearrange::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,         // bad flags, bad config, unreadable or malformed input
    kViolations = 2,    // validate found rule violations
    kInconsistent = 3,  // internal consistency failure
};

/// Entry point behind the `rearrange` binary: subcommands run, sweep,
/// validate and fit. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rearrange::cli
