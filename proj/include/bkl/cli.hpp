#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bkl {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitRuntime = 2,
  kExitPartial = 3,
};

/// Runs the command line in-process. `args` excludes the program name.
/// Results go to `out`; failures are written to `err` as one JSON line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bkl
