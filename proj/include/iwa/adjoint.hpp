#pragma once

#include <string>

#include "iwa/modules.hpp"

namespace iwa {

/// The adjoint computed as a finite tower: level modules are the duals of the
/// coinvariants (with the dotted action), transitions are induced by the
/// trace.  The limit is never materialized; invariants of the tower are
/// reported with an explicit stabilization verdict.
struct AdjointTower {
    std::vector<FiniteModule> levels;          // A_n, n = 0..n_max
    std::vector<Mat> transitions;              // t_n : A_{n+1} -> A_n
    std::vector<uint32_t> exponents;           // |A_n| = p^{e_n}
    std::vector<uint32_t> stable_image_exponents;  // |im(A_top -> A_n)|
    std::optional<GrowthFit> fit;              // fitted on the top levels
    bool stabilized = false;                   // two consecutive windows agree
    uint32_t n_max = 0;
};

// Requires finite coinvariants at every level <= n_max; reports the offending
// level otherwise.
AdjointTower adjoint_via_limit(const ModuleInput& M, uint32_t n_max);

// Closed form: the adjoint of an elementary module is elementary with the
// same factors; the dotted variant carries the involuted factors.  Factors
// come back in canonical form.
ElementaryModule adjoint_elementary(const ElementaryModule& M, bool dotted = false);

// The dotted module: action composed with gamma -> gamma^{-1}; for elementary
// data this is the factor-wise involution.
ElementaryModule dotted_module(const ElementaryModule& M);

// Adjoint of a square presentation: transpose with involuted entries.
SquareModule adjoint_square(const SquareModule& M);

/// Order identity |a^1_{Lambda_n}(M_Gamma_n)| = |a^1(M)_Gamma_n| (exact), with
/// an a^2 correction term when a finite summand is attached.
struct OrderIdentityReport {
    uint32_t level = 0;
    uint32_t lhs_exponent = 0;      // coinvariants of M (plus finite summand)
    uint32_t rhs_exponent = 0;      // coinvariants of the closed-form adjoint
    uint32_t a2_exponent = 0;       // invariants of the finite summand's dual
    bool holds = false;
    std::string note;
};

OrderIdentityReport verify_order_identity(const ModuleInput& M, uint32_t n);
OrderIdentityReport verify_order_identity(const ModuleInput& M, uint32_t n,
                                          const FiniteModule& finite_summand);

/// Testable shadow of "the adjoint has no nonzero pseudo-null submodule":
/// the image of the gamma-invariants of the top level under the composite
/// transitions must vanish at every level, stably in the tower height.
struct FiniteSubmoduleReport {
    bool conclusive = false;
    bool no_finite_submodule = false;
    std::vector<uint32_t> stable_invariant_image;  // order exponents per level
};

FiniteSubmoduleReport no_finite_submodule_check(const AdjointTower& tower);

}  // namespace iwa
