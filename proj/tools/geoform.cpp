#include <iostream>

#include "geoform/cli/commands.hpp"

int main(int argc, char** argv) { return geoform::cli::run(argc, argv, {std::cout, std::cerr}); }
