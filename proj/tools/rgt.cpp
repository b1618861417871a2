#include <iostream>

#include "rgt/cli.hpp"

int main(int argc, char** argv) { return rgt::cli::run(argc, argv, std::cout, std::cerr); }
