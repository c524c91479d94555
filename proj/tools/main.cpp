#include "swarmlab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return swarmlab::run_cli(argc, argv, std::cout, std::cerr); }
