#include <iostream>

#include "mgc/cli.hpp"

int main(int argc, char** argv) {
    return mgc::cli_execute(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
