#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hfaid::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `hfaid` tool. args[0] is the program name. Machine
// output goes to `out`, usage and error messages to `err`, logs to stderr.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hfaid::cli
