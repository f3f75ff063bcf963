#include "gnp/cli.hpp"

#include <iostream>
#include <vector>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gnp::cli::run(args, std::cout, std::cerr);
}
