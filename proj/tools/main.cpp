#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return satqkd::cli::run_cli(argc, argv, std::cout, std::cerr); }
