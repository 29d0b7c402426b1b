#pragma once

#include "geoaffect/error.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace geoaffect {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUnexpected = 1,
  kExitUsage = 2,
  kExitData = 3,
  kExitNumerical = 4,
};

int exit_code_for(ErrorKind kind);

/// Runs the tool; args[0] is the program name. Errors are reported on `err`
/// as one JSON object {"error": kind, "message": text, "exit_code": n}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geoaffect
