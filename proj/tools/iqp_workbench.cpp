#include <iostream>
#include <string>
#include <vector>

#include "iqp/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return iqp::cli::run(args, std::cout, std::cerr);
}
