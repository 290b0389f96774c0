#pragma once

#include <iosfwd>

namespace conflictfuzz::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfigError = 2,
  kOutputNotWritable = 3,
  kReplayDivergence = 4,
  kMalformedLedger = 5,
  kMalformedTrace = 6,
};

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Worker count from CONFLICT_FUZZ_WORKERS, defaulting to the hardware concurrency.
int workers_from_env();

}  // namespace conflictfuzz::cli
