#include <iostream>

#include <kmsgraph/cli.hpp>

int main(int argc, char** argv) {
  return kmsgraph::cli_main(argc, argv, std::cout, std::cerr);
}
