#include <iostream>
#include <string>
#include <vector>

#include "cadmm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cadmm::cli::run(args, std::cout, std::cerr);
}
