#include <iostream>

#include "clsm/commands.hpp"

int main(int argc, char** argv) { return clsm::run_cli(argc, argv, std::cout, std::cerr); }
