#include "gammasum/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return gammasum::cli::main_entry(argc, argv, std::cout, std::cerr);
}
