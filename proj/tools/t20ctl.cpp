#include <iostream>

#include "t20/cli.hpp"

int main(int argc, char** argv) { return t20::run_cli(argc, argv, std::cout, std::cerr); }
