#include <iostream>

#include "maxconf/cli.hpp"

int main(int argc, char **argv) { return maxconf::cli::run_cli(argc, argv, std::cout, std::cerr); }
