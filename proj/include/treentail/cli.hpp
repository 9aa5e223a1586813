#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace treentail::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumericFailure = 3 };

// Entry point behind the treentail executable. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace treentail::cli
