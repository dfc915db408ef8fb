#pragma once

#include <string>
#include <vector>

namespace dsts::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kVerificationFailure = 3,
};

/// Runs one subcommand: synth, train, eval, gradcheck, ablate, bench.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace dsts::cli
