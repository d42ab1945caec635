#include <iostream>

#include "agmon/cli.hpp"

int main(int argc, char** argv) { return agmon::cli::run(argc, argv, std::cout, std::cerr); }
