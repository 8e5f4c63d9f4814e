#pragma once

#include <iosfwd>

namespace hyperns::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kSuccess = 0,
  kOther = 1,
  kConfigError = 2,
  kNumericalFailure = 3,
  kIoError = 4,
};

/// Runs the tool. Failures print one line "error: <category>: <message>"
/// to err, with category usage, config, numerical, io, invariant or internal.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace hyperns::cli
