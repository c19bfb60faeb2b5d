#include <iostream>

#include "nlslab/cli.hpp"

int main(int argc, char** argv) { return nlslab::cli::run(argc, argv, std::cout, std::cerr); }
