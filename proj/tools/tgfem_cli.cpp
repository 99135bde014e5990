#include <iostream>
#include <string>
#include <vector>

#include "tgfem/experiment.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return tgfem::run_cli(args, std::cout, std::cerr);
}
