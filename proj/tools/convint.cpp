#include "convint/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return convint::cli::run(argc, argv, std::cout, std::cerr); }
