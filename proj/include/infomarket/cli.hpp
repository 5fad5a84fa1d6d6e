#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace infomarket::cli {

enum ExitCode : int {
    kOk = 0,
    kUsageError = 1,
    kNotConverged = 2,
    kNotCertified = 3,
};

/// Runs one CLI invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Fixed 12-significant-digit formatting used for every CSV number.
std::string format_number(double x);

}  // namespace infomarket::cli
