#include <iostream>

#include "nct_cli.hpp"

int main(int argc, char** argv) { return nct::cli::run(argc, argv, std::cout, std::cerr); }
