#include <iostream>

#include "nnst/cli.hpp"

int main(int argc, char** argv) { return nnst::cli_main(argc, argv, std::cout, std::cerr); }
