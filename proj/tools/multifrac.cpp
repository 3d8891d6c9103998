#include <iostream>

#include "multifrac/cli/app.hpp"

int main(int argc, char** argv) { return multifrac::cli::run(argc, argv, std::cout, std::cerr); }
