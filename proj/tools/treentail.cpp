#include <iostream>

#include "treentail/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return treentail::cli::run(args, std::cout, std::cerr);
}
