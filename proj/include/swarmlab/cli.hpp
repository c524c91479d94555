#pragma once

#include <ostream>

namespace swarmlab {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitNumerical = 3,
  kExitValidation = 4,
};

/// Entry point of the swarmlab command line. Errors are reported on err as one
/// JSON line {"error": kind, "message": text}.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace swarmlab
