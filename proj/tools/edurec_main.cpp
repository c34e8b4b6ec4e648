#include <iostream>

#include "edurec/cli.hpp"

int main(int argc, char** argv) { return edurec::run_cli(argc, argv, std::cout, std::cerr); }
