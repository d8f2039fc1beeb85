#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace imog::cli {

/// Process exit codes shared by all subcommands.
enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kMaxSteps = 2,
    kDivergence = 3,
    kMissingLipschitz = 4,
    kCheckFailed = 5,
};

/// Entry point of the `imog` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace imog::cli
