#include "bfgraph/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return bfgraph::cli::main(argc, argv, std::cout, std::cerr); }
