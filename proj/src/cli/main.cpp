#include <iostream>

#include "stowardrop/cli.hpp"

int main(int argc, char** argv) { return stowardrop::cli::run(argc, argv, std::cout, std::cerr); }
