#pragma once

#include <exception>
#include <iosfwd>

namespace restraint::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kDiscrepancy = 2,
  kSizeGuard = 3,
};

/// Runs one command line. Result data goes to `out` (or the -o file), logs
/// and the one-line error record go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Maps a failure to its exit code and writes the one-line JSON error record.
/// Anything other than validation, discrepancy or size-guard errors is rethrown.
int report_error(std::exception_ptr error, std::ostream& err);

}  // namespace restraint::cli
