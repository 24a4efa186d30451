#include "lwshrink/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return lwshrink::cli::run(argc, argv, std::cout, std::cerr); }
