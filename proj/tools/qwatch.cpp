#include <iostream>
#include <string>
#include <vector>

#include "qwatch/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qwatch::cli::run(args, std::cin, std::cout, std::cerr);
}
