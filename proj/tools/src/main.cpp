#include <iostream>

#include "catnet_cli/cli.hpp"

int main(int argc, char** argv) { return catnet::cli::run(argc, argv, std::cout, std::cerr); }
