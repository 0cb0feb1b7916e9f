#include <iostream>
#include <vector>

#include "stablesel/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return stablesel::run_cli(args, std::cout, std::cerr);
}
