#include <iostream>

#include "sparsenle/cli.hpp"

int main(int argc, char** argv) { return sparsenle::run(argc, argv, std::cout, std::cerr); }
