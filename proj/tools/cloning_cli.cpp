#include <iostream>

#include "cloning/cli.hpp"

int main(int argc, char** argv) { return cloning::cli::run(argc, argv, std::cout, std::cerr); }
