#include "loel_cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return loel::cli::cli_dispatch(argc, argv, std::cout, std::cerr); }
