#include <iostream>

#include "mesinar/cli/commands.hpp"

int main(int argc, char** argv) { return mesinar::cli::run_cli(argc, argv, std::cout, std::cerr); }
