#include <iostream>

#include "dagforge/cli.hpp"

int main(int argc, char** argv) { return dagforge::cli::run(argc, argv, std::cout, std::cerr); }
