#include <cstring>
#include <iostream>

#include "iwa/acceptance.hpp"

int main(int argc, char** argv) {
    uint64_t seed = 20260808;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], "--seed") == 0) seed = std::strtoull(argv[i + 1], nullptr, 10);
    return iwa::print_acceptance_suite(std::cout, seed);
}
