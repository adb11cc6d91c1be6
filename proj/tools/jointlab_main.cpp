#include <iostream>

#include "jointlab/cli.hpp"

int main(int argc, char** argv) { return jointlab::run_cli(argc, argv, std::cout, std::cerr); }
