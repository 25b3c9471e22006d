#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dfpart::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitValidation = 2;

/// Runs the command line `args` (args[0] is the program name) and returns the
/// process exit code. Diagnostics go to `err`, the report to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dfpart::cli
