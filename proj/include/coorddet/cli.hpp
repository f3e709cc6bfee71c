#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coorddet::cli {

// Exit codes shared by the binary and in-process callers.
inline constexpr int kOk = 0;        // success; for `detect`, H0
inline constexpr int kUsage = 2;     // bad flags, unreadable or invalid input
inline constexpr int kRejected = 3;  // `detect` concluded H1

// Runs one CLI invocation. `args` excludes the program name (as in
// argv+1..argv+argc). All output goes to the supplied streams so tests can
// capture it.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace coorddet::cli
