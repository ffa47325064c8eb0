#include <iostream>
#include <string>
#include <vector>

#include "ogf/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ogf::run_cli(args, std::cout, std::cerr);
}
