#include "eventcast/cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return eventcast::cli::run_cli(argc, argv, std::cout, std::cerr); }
