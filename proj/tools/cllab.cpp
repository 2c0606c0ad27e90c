#include <iostream>
#include <string>
#include <vector>

#include "cllab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cllab::run_cli(args, std::cout, std::cerr);
}
