#pragma once

#include <stdexcept>
#include <string>

namespace sfm {

// CLI exit codes. Library code throws; the CLI maps exception type -> code.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,      // bad flags or configuration
  kExitIo = 2,         // file system / format failures
  kExitNumeric = 3,    // non-finite values in training or inference
  kExitTolerance = 4,  // oracle discrepancy above tolerance
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration value (unknown kind, non-COLA STFT setup, bad bounds).
struct ConfigError : Error {
  using Error::Error;
};

// API contract violation: shape mismatch, inadmissible (t, dt), bad counts.
struct ContractError : Error {
  using Error::Error;
};

// Input outside the operation's mathematical domain (e.g. silent reference).
struct DomainError : Error {
  using Error::Error;
};

// File or stream failure; message carries the path.
struct IoError : Error {
  using Error::Error;
};

// Versioned binary format mismatch (magic / version / size checks).
struct FormatError : Error {
  using Error::Error;
};

// Non-finite gradient or loss. `step` is the optimizer step (1-based) or
// batch index at which training failed.
struct TrainError : Error {
  TrainError(const std::string& msg, long step_index)
      : Error(msg), step(step_index) {}
  long step;
};

// Non-finite state during ODE inference. `step` is the failing update index,
// `nfe` the number of network evaluations completed before the failure.
struct InferError : Error {
  InferError(const std::string& msg, int step_index, int nfe_done)
      : Error(msg), step(step_index), nfe(nfe_done) {}
  int step;
  int nfe;
};

}  // namespace sfm
