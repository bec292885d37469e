#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ensmot::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point shared by the `ensmot` binary and the tests. `args` excludes
/// the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ensmot::cli
