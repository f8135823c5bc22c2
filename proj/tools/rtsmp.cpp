#include "rtsmp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return rtsmp::run(argc, argv, std::cout, std::cerr); }
