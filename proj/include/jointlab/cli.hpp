#pragma once

#include <exception>
#include <ostream>

namespace jointlab {

/// The jointlab command line. Returns the process exit code: 0 on success,
/// 1 on usage or input errors, 2 when an internal invariant check fails.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Exit code for a command that failed with `e`: 2 for InvariantViolation, else 1.
int exit_code_for(const std::exception& e);

}  // namespace jointlab
