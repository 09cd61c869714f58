#include <iostream>

#include "reachmo_cli.hpp"

int main(int argc, char** argv) { return reachmo::cli::dispatch(argc, argv, std::cout, std::cerr); }
