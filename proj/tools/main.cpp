#include <iostream>

#include "eikinetic/cli.hpp"

int main(int argc, char** argv) { return eikinetic::cli::run(argc, argv, std::cout, std::cerr); }
