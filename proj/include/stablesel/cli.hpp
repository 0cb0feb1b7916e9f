#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stablesel {

// Command-line entry point, separated from main() so tests can drive it
// in-process. `args` excludes the program name. Returns the process exit
// code: 0 success, 2 bad input, 3 resource cap, 4 internal invariant.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stablesel
