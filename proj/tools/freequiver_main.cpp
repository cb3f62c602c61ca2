#include <iostream>

#include "freequiver/cli.hpp"

int main(int argc, char** argv) { return freequiver::cli::run(argc, argv, std::cout, std::cerr); }
