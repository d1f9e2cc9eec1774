#include <iostream>

#include "cvhier/cli.hpp"

int main(int argc, char** argv) { return cvh::run_cli(argc, argv, std::cout, std::cerr); }
