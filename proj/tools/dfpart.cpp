#include <iostream>
#include <string>
#include <vector>

#include "dfpart/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return dfpart::cli::run(args, std::cout, std::cerr);
}
