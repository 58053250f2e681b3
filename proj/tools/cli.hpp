#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace phase_manifold::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3 };

// Entry point shared by the executable and the tests. args[0] is the program
// name. Diagnostics go to `err`, help text to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phase_manifold::cli
