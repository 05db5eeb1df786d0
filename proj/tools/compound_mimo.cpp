#include <iostream>

#include "cmimo/cli.hpp"

int main(int argc, char** argv) { return cmimo::cli_main(argc, argv, std::cout, std::cerr); }
