#include <iostream>
#include <string>
#include <vector>

#include "hfaid/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return hfaid::cli::run(args, std::cout, std::cerr);
}
