#include <iostream>

#include "infomarket/cli.hpp"

int main(int argc, char** argv) {
    return infomarket::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
