#include <iostream>

#include "minnorm/cli.hpp"

int main(int argc, char** argv) { return minnorm::cli::run(argc, argv, std::cout, std::cerr); }
