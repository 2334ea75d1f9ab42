#include <iostream>

#include "hbref/cli.hpp"

int main(int argc, char** argv) { return hbref::cli_main(argc, argv, std::cout, std::cerr); }
