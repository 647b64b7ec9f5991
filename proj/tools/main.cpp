#include <iostream>

#include "hitchin/cli.hpp"

int main(int argc, char** argv) { return hitchin::run_cli(argc, argv, std::cout, std::cerr); }
