#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace detmat {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // usage errors and anything unexpected
  kExitParse = 2,
  kExitRegime = 3,
  kExitMismatch = 4,
};

/// Runs the detmat command line on args (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace detmat
