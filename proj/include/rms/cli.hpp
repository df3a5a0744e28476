#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rms {

enum ExitCode : int {
  kExitOk = 0,
  kExitWarnings = 1,
  kExitFrontendError = 2,
  kExitInternalError = 3,
};

/// Entry point of the `rms` command; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rms
