#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qconv::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,  // usage, parse, domain and I/O errors
  kSolverRefusal = 2,
  kVerificationFailed = 3,
};

/// Runs one qconv invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qconv::cli
