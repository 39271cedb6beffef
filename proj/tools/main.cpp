#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return comac::cli::run_main(argc, argv, std::cout, std::cerr);
}
