#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ragscale::cli {

/// Exit codes: 0 success, 1 domain error, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation. args[0] is the program name. Report files are written
/// only when the command succeeds.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ragscale::cli
