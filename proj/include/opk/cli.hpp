#pragma once

#include <iosfwd>

namespace opk::cli {

inline constexpr const char *kVersion = "opk 1.0.0";

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kInputError = 2, kNegativeVerdict = 3, kNumericalFailure = 4 };

/// Entry point used by the executable and by the tests.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace opk::cli
