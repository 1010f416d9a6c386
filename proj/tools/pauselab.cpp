#include <iostream>

#include "pauselab/cli/commands.hpp"

int main(int argc, char** argv) { return pauselab::cli::run_cli(argc, argv, std::cout, std::cerr); }
