#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isodiam::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFinding = 1;  // a checked property failed
inline constexpr int kExitUsage = 2;    // bad flags, unreadable or invalid input
inline constexpr int kExitRuntime = 3;  // computation aborted

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace isodiam::cli
