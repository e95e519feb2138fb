#include <iostream>

#include "selfs/cli.hpp"

int main(int argc, char** argv) { return selfs::run_cli(argc, argv, std::cout, std::cerr); }
