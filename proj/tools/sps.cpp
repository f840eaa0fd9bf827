#include <iostream>

#include "sps/cli.hpp"

int main(int argc, char** argv) { return sps::run_cli(argc, argv, std::cout, std::cerr); }
