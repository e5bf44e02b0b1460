#include <iostream>

#include "platehom/cli.hpp"

int main(int argc, char** argv) {
  return platehom::cli::run(argc, argv, std::cout, std::cerr);
}
