#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ratesvol::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kEstimationError = 3, kStabilityError = 4 };

/// Runs the command line `args` (without the program name). Reports go to `out`,
/// diagnostics to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ratesvol::cli
