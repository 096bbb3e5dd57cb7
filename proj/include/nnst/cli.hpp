#pragma once

// `nnst` command-line entry point.
//
//   nnst simulate <config>       run the coupled system, write diagnostics.csv + snapshots
//   nnst solve-stokes <config>   one velocity solve at the smoothed initial density
//   nnst verify <suite|all>      invariant batteries
//   nnst classify <config>       exponent class of a configuration
//   nnst besov <snapshot> --s S --p P --r R
//
// Exit codes: 0 ok, 1 usage, 2 configuration/input error, 3 solver failure,
// 4 verification failure.

#include <ostream>

namespace nnst {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitConfig = 2, kExitSolver = 3, kExitVerify = 4 };

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nnst
