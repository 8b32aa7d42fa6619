#include <iostream>
#include <string>
#include <vector>

#include "wgkit/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return wgkit::run_subcommand(args, std::cout, std::cerr);
}
