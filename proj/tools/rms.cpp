#include <iostream>
#include <string>
#include <vector>

#include "rms/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rms::run_cli(args, std::cout, std::cerr);
}
