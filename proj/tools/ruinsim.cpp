#include <iostream>

#include "ruin/cli.hpp"

int main(int argc, char** argv) { return ruin::run_cli(argc, argv, std::cout, std::cerr); }
