#include <iostream>
#include <string>
#include <vector>

#include "qlf_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return qlf::cli::run(args, std::cout, std::cerr);
}
