#include <iostream>

#include "dpcollapse/cli.hpp"

int main(int argc, char** argv) {
    return dpcollapse::cli::run(argc, argv, std::cout, std::cerr);
}
