#include <iostream>

#include "netcrop_cli/cli.hpp"

int main(int argc, char** argv) { return netcrop::cli::run(argc, argv, std::cin, std::cout, std::cerr); }
