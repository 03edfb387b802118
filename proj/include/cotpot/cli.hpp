#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cotpot::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDegraded = 2;

/// Runs one command line (args excludes the program name). Results go to
/// `out`, logs and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cotpot::cli
