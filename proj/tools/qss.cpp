#include <iostream>

#include "qss/cli.hpp"

int main(int argc, char** argv) { return qss::cli::run_command(argc, argv, std::cout, std::cerr); }
