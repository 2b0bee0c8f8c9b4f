#include <iostream>

#include "equihf/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return equihf::run_cli(args, std::cout, std::cerr, std::cin);
}
