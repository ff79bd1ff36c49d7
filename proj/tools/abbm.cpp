#include <iostream>

#include "abbm/cli.hpp"

int main(int argc, char** argv) { return abbm::cli::main(argc, argv, std::cout, std::cerr); }
