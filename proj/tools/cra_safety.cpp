#include <iostream>

#include "cra_safety/cli.hpp"

int main(int argc, char** argv) { return cra::run_cli(argc, argv, std::cout, std::cerr); }
