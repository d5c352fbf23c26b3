#include <iostream>

#include "capnorm/cli.hpp"

int main(int argc, char** argv) { return capnorm::cli::run(argc, argv, std::cout, std::cerr); }
