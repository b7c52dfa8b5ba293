#include <iostream>

#include "kjet/cli.hpp"

int main(int argc, char** argv) {
  return kjet::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
