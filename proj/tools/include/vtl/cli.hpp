#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vtl::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kScenarioError = 2,
    kTimeout = 3,
};

/// Entry point of `vtlsim`. `args` excludes the program name.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vtl::cli
