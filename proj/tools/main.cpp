#include <iostream>
#include <string>
#include <vector>

#include "fodef/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fodef::run_cli(args, std::cout, std::cerr);
}
