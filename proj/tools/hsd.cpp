#include <iostream>

#include "hsd/cli/commands.hpp"

int main(int argc, char** argv) { return hsd::cli::run(argc, argv, std::cout, std::cerr); }
