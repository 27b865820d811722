#include <iostream>

#include "cli/commands.hpp"

int main(int argc, char** argv) { return longmem::cli::run_cli(argc, argv, std::cout, std::cerr); }
