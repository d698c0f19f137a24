#pragma once

#include <iosfwd>

namespace dagforge::cli {

enum ExitCode : int {
  kOk = 0,
  kIoOrSyntax = 1,
  kValidation = 2,
  kStarvation = 3,
};

/// Entry point of the `dagforge` tool. Data and DOT go to `out`, diagnostics
/// to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dagforge::cli
