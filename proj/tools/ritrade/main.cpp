#include "ritrade/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return ritrade::cli::run_cli(argc, argv, std::cout, std::cerr);
}
