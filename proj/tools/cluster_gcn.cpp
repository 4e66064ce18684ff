#include <iostream>
#include <string>
#include <vector>

#include "cgcn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cgcn::run_cli(args, std::cout, std::cerr);
}
