#include <iostream>
#include <string>
#include <vector>

#include "sps/cli/commands.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return sps::cli::run_cli(args, std::cout, std::cerr);
}
