#pragma once

#include <iosfwd>

namespace edurec {

// Exit codes are a stable contract.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitSchema = 4,
  kExitModelMismatch = 5,
  kExitEmptyCohort = 6,
};

// Entry point of the edurec tool: generate, analyze, train, recommend, group, cohort.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace edurec
