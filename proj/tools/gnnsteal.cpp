#include <iostream>

#include "gnnsteal/cli.hpp"

int main(int argc, char** argv) { return gnnsteal::cli::run(argc, argv, std::cout, std::cerr); }
