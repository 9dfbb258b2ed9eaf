#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mrr {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;          // completed, nothing found
inline constexpr int kExitViolation = 1;   // invariant violation or CTI found
inline constexpr int kExitUsage = 2;       // bad flags, names, files
inline constexpr int kExitIncomplete = 3;  // budget exhausted before the space

// Runs the command line given argv-style arguments (program name excluded).
// All human output goes to `out`; artifacts go to the --out path.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mrr
