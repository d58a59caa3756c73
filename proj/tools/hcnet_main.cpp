#include <iostream>

#include "hcnet/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hcnet::run_cli(args, std::cout, std::cerr);
}
