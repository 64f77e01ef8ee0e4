#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace omnizoom {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,        // invalid flags, dimension mismatch in eval
  kExitIo = 3,           // decode / IO failure
  kExitNearSingular = 4, // |ad - bc| <= 1e-12
};

/// Entry point for `omnizoom <warp|synth|eval|serve> ...`. args excludes the
/// program name. Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace omnizoom
