#include <iostream>
#include <string>
#include <vector>

#include "freeconvex/cli.hpp"

int main(int argc, char** argv) {
  return freeconvex::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout);
}
