#include <iostream>

#include "memdecay/cli.hpp"

int main(int argc, char** argv) {
  return memdecay::run_cli(argc, argv, std::cout, std::cerr);
}
