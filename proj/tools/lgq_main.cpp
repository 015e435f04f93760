#include <iostream>
#include <string>
#include <vector>

#include "lgq/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lgq::cli::run_command(args, std::cout, std::cerr);
}
