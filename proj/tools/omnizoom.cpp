#include <iostream>
#include <string>
#include <vector>

#include "omnizoom/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return omnizoom::run_cli(args, std::cout, std::cerr);
}
