#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cfkit {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitRuntime = 3,
};

// Entry point of the `cfkit` command (stats | knn | mf). args excludes the
// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace cfkit
