#include <iostream>

#include "gtep/cli.hpp"

int main(int argc, char** argv) { return gtep::cli_main(argc, argv, std::cout, std::cerr); }
