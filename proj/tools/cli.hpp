#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gcabulf::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitTraining = 3,
};

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gcabulf::cli
