#include <iostream>

#include "fbd/cli.hpp"

int main(int argc, char** argv) { return fbd::run_cli(argc, argv, std::cout, std::cerr); }
