#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "iwa/lambda.hpp"

namespace iwa {

/// Finite abelian p-group oplus Z/p^{orders[i]} with a gamma-action matrix.
/// orders are exponents, descending; the action matrix is invertible mod p,
/// well defined on the cyclic decomposition, and gamma^{p^level} acts as the
/// identity.
struct FiniteModule {
    RingContext ctx;
    uint32_t level = 0;
    std::vector<uint32_t> orders;
    Mat action;

    uint32_t rank() const { return uint32_t(orders.size()); }
    uint32_t order_exponent() const;
    bool is_zero() const { return orders.empty(); }
};

FiniteModule make_finite_module(RingContext ctx, uint32_t level,
                                std::vector<uint32_t> orders, Mat action);
FiniteModule zero_finite_module(RingContext ctx, uint32_t level);

// Does the matrix define a homomorphism oplus Z/p^{src} -> oplus Z/p^{dst}?
bool map_well_defined(const Mat& h, const std::vector<uint32_t>& src,
                      const std::vector<uint32_t>& dst);
// Entry-wise congruence modulo the row orders.
bool maps_equal_mod_orders(const Mat& x, const Mat& y, const std::vector<uint32_t>& row_orders);

FiniteModule direct_sum(const FiniteModule& x, const FiniteModule& y);

// coker(gamma^{p^m} - 1) with the induced action, as a module of level m.
FiniteModule coinvariants(const FiniteModule& N, uint32_t m);
// ker(gamma^{p^m} - 1) with the induced action.
FiniteModule invariants(const FiniteModule& N, uint32_t m);
// Same kernel, together with its generators in the coordinates of N.
struct SubmoduleWithEmbedding {
    FiniteModule sub;
    Mat embedding;  // N.rank() x sub.rank()
};
SubmoduleWithEmbedding invariants_with_embedding(const FiniteModule& N, uint32_t m);

// Pontryagin dual: same orders, contragredient action.
FiniteModule pontryagin_dual(const FiniteModule& N);
// Action composed with gamma -> gamma^{-1}.
FiniteModule dot(const FiniteModule& N);
// a^1 at a finite level: dual of the Z_p-torsion (= everything here) with the
// dotted convention folded in.
FiniteModule finite_level_adjoint(const FiniteModule& N);

// Trace endomorphism sum_{i<p} gamma^{i p^{target}} of N (target = N.level-1
// in the tower use; any target is accepted).
Mat trace_matrix(const FiniteModule& N, uint32_t target_level);

// Dual of a map h: (src orders) -> (dst orders); the result maps the dual of
// dst to the dual of src.
Mat dual_map(const Mat& h, const std::vector<uint32_t>& src_orders,
             const std::vector<uint32_t>& dst_orders);

/// Free-rank detection from order profiles at precisions a and a+1.
struct TorsionRankSplit {
    uint32_t free_rank = 0;
    std::vector<uint32_t> torsion_orders;
    bool determined = true;
};
TorsionRankSplit zp_torsion_and_rank(const std::vector<uint32_t>& orders_at_a,
                                     const std::vector<uint32_t>& orders_at_a1, uint32_t a);

// --- finitely generated torsion Lambda-modules --------------------------------

/// oplus Lambda/(f_i); empty factor list is the zero module.
struct ElementaryModule {
    RingContext ctx;
    std::vector<Series1> factors;
};

/// coker(A : Lambda^d -> Lambda^d) with det(A) nonzero at precision.
struct SquareModule {
    RingContext ctx;
    uint32_t dim = 0;
    std::vector<Series1> entries;  // row-major, dim x dim

    const Series1& at(uint32_t i, uint32_t j) const { return entries[size_t(i) * dim + j]; }
};

SquareModule make_square_module(RingContext ctx, uint32_t dim, std::vector<Series1> entries);

/// Two-variable elementary module, used by the parity machinery.
struct ElementaryModule2 {
    RingContext ctx;
    std::vector<Series2> factors;
};

using ModuleInput = std::variant<ElementaryModule, SquareModule, FiniteModule>;

const RingContext& module_context(const ModuleInput& M);

/// Coinvariants M/omega_n M with full coordinate data.
///   finite      order stabilized between precisions a and a+1
///   ambient_dim rank of the ambient free module the quotient was cut from
struct LevelQuotient {
    FiniteModule mod;
    QuotientStructure coords;
    uint32_t ambient_dim = 0;
    bool finite = true;
    uint32_t exponent_at_a = 0;
    uint32_t exponent_at_a1 = 0;
};

LevelQuotient coinvariants_at_level(const ModuleInput& M, uint32_t n);
// Same computation carried out at the given precision override.
LevelQuotient coinvariants_at_level(const ModuleInput& M, uint32_t n, const RingContext& ctx);

// Ambient matrix of the trace map (level n coinvariants -> level n+1
// coinvariants) for the same module input.
Mat ambient_trace(const ModuleInput& M, uint32_t n);

// Determinant of a matrix of series (cofactor expansion; dim <= 8).
Series1 series_determinant(const std::vector<Series1>& entries, uint32_t dim);

// Characteristic series in canonical p^mu * distinguished form.
Series1 char_series(const ModuleInput& M);

/// e_n = mu p^n + lambda n + nu fitted on the top levels of a range.
struct GrowthFit {
    uint32_t mu = 0;
    uint32_t lambda = 0;
    int64_t nu = 0;
    std::vector<uint32_t> exponents;  // e_n for n in [lo, hi]
    std::vector<int64_t> residuals;   // e_n - predicted
    bool exact = false;
};

GrowthFit iwasawa_invariants_via_growth(const ModuleInput& M, uint32_t n_lo, uint32_t n_hi);

// char series is a unit and coinvariant orders stabilize across levels and
// precisions.  FiniteModule inputs are pseudo-null by definition here.
bool is_pseudo_null(const ModuleInput& M);

}  // namespace iwa
