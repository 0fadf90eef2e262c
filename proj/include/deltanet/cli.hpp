#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace deltanet {

/// Exit codes of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitFlavorMismatch = 2,
  kExitLimit = 3,
  kExitInternal = 4,
};

/// Runs `deltanet <command> ...` with `args` excluding the program name.
/// `in` backs the "-" input. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace deltanet
