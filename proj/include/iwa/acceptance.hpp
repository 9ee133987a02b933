#pragma once

#include <string>
#include <vector>

#include "iwa/descriptor.hpp"

namespace iwa {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

/// The built-in verification corpus: ten criteria, each exact at its stated
/// precision, each deterministic for a fixed seed.
std::vector<CriterionResult> run_acceptance_suite(uint64_t seed = 20260808);

// One pass/fail line per criterion; returns the suite exit code (0/1).
int print_acceptance_suite(std::ostream& os, uint64_t seed = 20260808);

}  // namespace iwa
