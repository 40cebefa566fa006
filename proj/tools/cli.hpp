#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pitchfuse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs the command line with `args` (argv without the program name).
/// Reports go to `out`, diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pitchfuse::cli
