#pragma once

#include "iwa/pairing.hpp"

namespace iwa {

/// Projective system of finite modules over the discrete valuation base
/// (Z_p at precision, uniformizer p) with surjective transitions.
struct ProjectiveSystem {
    RingContext ctx;
    std::vector<FiniteModule> levels;
    std::vector<Mat> transitions;  // transitions[k] : levels[k+1] -> levels[k]
};

ProjectiveSystem make_projective_system(RingContext ctx, std::vector<FiniteModule> levels,
                                        std::vector<Mat> transitions);

bool transition_surjective(const ProjectiveSystem& sys, uint32_t k);

// Invariant-factor exponents r_1(n) >= ... >= r_d(n), zero-padded to the
// largest factor count over the system's levels.
std::vector<uint32_t> divisor_profile(const ProjectiveSystem& sys, uint32_t n);

/// Guo-style rank estimate: the number of invariant-factor sequences judged
/// unbounded within the horizon (growing at the top step and above the
/// precision threshold a/2).
struct RankEstimate {
    uint32_t d = 0;
    uint32_t unbounded_count = 0;
    uint32_t horizon = 0;
    std::string confidence;
};

RankEstimate guo_rank(const ProjectiveSystem& sys, uint32_t horizon);

/// Parity verdict for a system carrying alternating forms: profiles pair up
/// after quotienting the declared kernels, hence the limit rank is even.
struct ParityReport {
    bool pass = false;
    uint32_t even_rank = 0;  // 2 * (number of unbounded pairs)
    std::string failure;     // empty when pass
    std::vector<std::vector<uint32_t>> paired_profiles;  // per level, after quotient
};

// kernel_bound: declared p-power exponent bound on the form kernels
// ("quasi-nondegenerate"); verified, not inferred.
ParityReport parity_check(const ProjectiveSystem& sys, const std::vector<FiniteForm>& forms,
                          uint32_t kernel_bound, uint32_t horizon);

/// lambda_n for a two-variable elementary module: the minimal generator count
/// of (M / omega_n(T1)) tensor Q_p over Q_p[[T2]], computed by unit-pivot
/// elimination on the multiplication matrix at precision.
struct LambdaCongruenceReport {
    std::vector<uint32_t> lambdas;       // per level in the range
    std::vector<bool> determined;        // per level
    bool congruence_holds = false;       // lambda_n = lambda_0 (mod p-1)
    bool all_determined = false;
};

LambdaCongruenceReport lambda_congruence_check(const ElementaryModule2& M, uint32_t n_lo,
                                               uint32_t n_hi);

// Single-level rank datum (exposed for tests).
struct LocalCorank {
    uint32_t corank = 0;
    bool determined = true;
    uint32_t precision_erosion = 0;  // largest pivot-valuation accumulated on a row
};

LocalCorank lambda_level_rank(const ElementaryModule2& M, uint32_t n);

}  // namespace iwa
