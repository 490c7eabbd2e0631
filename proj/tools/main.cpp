#include <iostream>

#include "bsrnn/cli.hpp"

int main(int argc, char** argv) { return bsrnn::run_cli(argc, argv, std::cout, std::cerr); }
