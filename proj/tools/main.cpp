#include <iostream>

#include "opk/cli.hpp"

int main(int argc, char **argv) { return opk::cli::run(argc, argv, std::cout, std::cerr); }
