#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pqfi::cli {

enum ExitCode : int {
  kOk = 0,
  kArgumentError = 2,
  kNotConverged = 3,
  kDivergent = 4,
};

struct Environment {
  /// ANSI emphasis in human output.
  bool color = false;
};

/// Runs one invocation. `args` includes the program name. Data goes to `out`
/// (or the --output file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Environment& env = {});

}  // namespace pqfi::cli
