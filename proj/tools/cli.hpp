#pragma once

#include <ostream>

namespace pbitemu::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationError = 2,
  kVerifyFailed = 3,
  kBudgetExceeded = 4,
};

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pbitemu::cli
