#include <iostream>

#include "lmv/app/cli.hpp"

int main(int argc, char** argv) { return lmv::run_cli(argc, argv, std::cout, std::cerr); }
