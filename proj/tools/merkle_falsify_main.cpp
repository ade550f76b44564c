#include <iostream>
#include <string>
#include <vector>

#include "merkle_falsify/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return merkle_falsify::run_cli(args, std::cout, std::cerr);
}
