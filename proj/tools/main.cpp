#include <iostream>
#include <string>
#include <vector>

#include "ia_arena/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ia_arena::run_cli(args, std::cout, std::cerr);
}
