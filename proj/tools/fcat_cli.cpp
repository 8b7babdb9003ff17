#include "fcat/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return fcat::cli::run(argc, argv, std::cout, std::cerr); }
