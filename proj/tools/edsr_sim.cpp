#include <iostream>
#include <string>
#include <vector>

#include "edsr/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return edsr::run(args, std::cout, std::cerr);
}
