#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace amatch::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kFormat = 3,
  kShape = 4,
  kNumeric = 5,
};

// Runs one command line; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace amatch::cli
