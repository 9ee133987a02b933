#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "iwa/errors.hpp"

namespace iwa {

/// Ambient precision data: odd prime p, p-adic precision exponent a,
/// T-adic truncation order m, and the number of Iwasawa variables.
/// All computations in the library are exact statements about the image of
/// an object in Lambda/(p^a, T^m).
struct RingContext {
    uint32_t p = 3;
    uint32_t a = 1;
    uint32_t m = 1;
    uint32_t vars = 1;
    uint64_t pa = 3;  // p^a, cached

    static RingContext make(uint32_t p, uint32_t a, uint32_t m, uint32_t vars = 1);

    bool operator==(const RingContext& o) const {
        return p == o.p && a == o.a && m == o.m && vars == o.vars;
    }
    bool operator!=(const RingContext& o) const { return !(*this == o); }

    // Same ring, one more p-adic digit.  Used by the stabilization oracles.
    RingContext lifted() const { return make(p, a + 1, m, vars); }
    // Same ring at precision a - mu (Weierstrass data after stripping p^mu).
    RingContext reduced(uint32_t mu) const;
};

void require_same_context(const RingContext& x, const RingContext& y, const char* where);

// p-adic valuation of a residue r mod p^a.  `saturated` means the residue is
// zero at this precision, i.e. the true valuation is >= a; the numeric value
// is then a, but it must never be read as an exact valuation.
struct Valuation {
    uint32_t value = 0;
    bool saturated = false;

    bool is_zero_at_precision() const { return saturated; }
    bool is_unit() const { return !saturated && value == 0; }
};

namespace modarith {

uint64_t add(uint64_t x, uint64_t y, uint64_t pa);
uint64_t sub(uint64_t x, uint64_t y, uint64_t pa);
uint64_t mul(uint64_t x, uint64_t y, uint64_t pa);
uint64_t neg(uint64_t x, uint64_t pa);
uint64_t pow(uint64_t x, uint64_t e, uint64_t pa);
// Inverse of a unit mod p^a via extended gcd; throws not_invertible.
uint64_t inv(uint64_t x, uint64_t pa);
Valuation val(uint64_t r, uint32_t p, uint32_t a);
// Exact division by p^k; requires val(r) >= k as an integer (true for
// canonical residues with valuation >= k).
uint64_t div_pow_p(uint64_t r, uint32_t p, uint32_t k);
uint64_t pow_u64(uint64_t b, uint32_t e);  // plain integer power, checked

}  // namespace modarith

/// A single element of Z/p^a tied to its context.
struct PadicScalar {
    RingContext ctx;
    uint64_t r = 0;

    PadicScalar() = default;
    PadicScalar(RingContext c, uint64_t value) : ctx(c), r(value % c.pa) {}

    Valuation valuation() const { return modarith::val(r, ctx.p, ctx.a); }
    bool is_zero() const { return r == 0; }
    bool is_unit() const { return valuation().is_unit(); }

    PadicScalar inverse() const { return {ctx, modarith::inv(r, ctx.pa)}; }

    friend PadicScalar operator+(const PadicScalar& x, const PadicScalar& y) {
        require_same_context(x.ctx, y.ctx, "scalar +");
        return {x.ctx, modarith::add(x.r, y.r, x.ctx.pa)};
    }
    friend PadicScalar operator-(const PadicScalar& x, const PadicScalar& y) {
        require_same_context(x.ctx, y.ctx, "scalar -");
        return {x.ctx, modarith::sub(x.r, y.r, x.ctx.pa)};
    }
    friend PadicScalar operator*(const PadicScalar& x, const PadicScalar& y) {
        require_same_context(x.ctx, y.ctx, "scalar *");
        return {x.ctx, modarith::mul(x.r, y.r, x.ctx.pa)};
    }
    friend bool operator==(const PadicScalar& x, const PadicScalar& y) {
        return x.ctx == y.ctx && x.r == y.r;
    }
};

/// Dense matrix over Z/p^a, row-major.
class Mat {
  public:
    Mat() = default;
    Mat(RingContext ctx, uint32_t rows, uint32_t cols)
        : ctx_(ctx), rows_(rows), cols_(cols), v_(size_t(rows) * cols, 0) {}

    static Mat identity(RingContext ctx, uint32_t n);

    uint32_t rows() const { return rows_; }
    uint32_t cols() const { return cols_; }
    const RingContext& context() const { return ctx_; }

    uint64_t& at(uint32_t i, uint32_t j) { return v_[size_t(i) * cols_ + j]; }
    uint64_t at(uint32_t i, uint32_t j) const { return v_[size_t(i) * cols_ + j]; }

    bool is_zero() const;
    bool operator==(const Mat& o) const {
        return ctx_ == o.ctx_ && rows_ == o.rows_ && cols_ == o.cols_ && v_ == o.v_;
    }

    Mat operator*(const Mat& o) const;
    Mat operator+(const Mat& o) const;
    Mat operator-(const Mat& o) const;
    Mat scaled(uint64_t c) const;
    Mat transpose() const;
    Mat pow(uint64_t e) const;  // square matrices

    void swap_rows(uint32_t i, uint32_t j);
    void swap_cols(uint32_t i, uint32_t j);
    // row_i += c * row_k  /  col_j += c * col_k
    void add_row(uint32_t i, uint32_t k, uint64_t c);
    void add_col(uint32_t j, uint32_t k, uint64_t c);
    void scale_row(uint32_t i, uint64_t c);

    // Reinterpret the same residues in another context with equal p and m.
    // Residues are reduced (a smaller) or lifted canonically (a larger).
    Mat with_context(const RingContext& c) const;

    std::vector<uint64_t> apply(const std::vector<uint64_t>& x) const;  // matrix * column

  private:
    RingContext ctx_;
    uint32_t rows_ = 0, cols_ = 0;
    std::vector<uint64_t> v_;
};

/// L * A * R = diag(p^{e_1}, ..., p^{e_k}), exponents descending, entries
/// normalized to pure p-powers (a zero diagonal entry is recorded with
/// exponent a).  L and R are invertible mod p.
struct SmithForm {
    Mat left;
    Mat right;
    std::vector<uint32_t> exponents;  // size min(rows, cols), descending

    Mat diagonal_matrix(const RingContext& ctx, uint32_t rows, uint32_t cols) const;
};

SmithForm smith_normal_form(const Mat& A);

// Orders of the cyclic factors of coker(A : Z^cols -> Z^rows) at precision,
// as p-power exponents, descending, zeros dropped.  Rows not reached by the
// diagonal contribute exponent a.
std::vector<uint32_t> cokernel_exponents(const Mat& A);

// Columns generate ker(A) as a submodule of (Z/p^a)^cols.
Mat kernel_generators(const Mat& A);

// One solution of A x = b, if any.
std::optional<std::vector<uint64_t>> solve(const Mat& A, const std::vector<uint64_t>& b);

// Inverse of a square matrix whose determinant is a unit; throws not_invertible.
Mat inverse(const Mat& A);

bool invertible_mod_p(const Mat& A);

/// Structure data for Q = (Z/p^a)^rows / im(relations):
///   orders    cyclic factor exponents, descending, trivial factors dropped
///   project   k x rows: coordinates of an ambient vector in the new generators
///   embed     rows x k: the new generators, in ambient coordinates
struct QuotientStructure {
    std::vector<uint32_t> orders;
    Mat project;
    Mat embed;

    uint32_t rank() const { return uint32_t(orders.size()); }
    uint32_t order_exponent() const;
};

QuotientStructure quotient_structure(const RingContext& ctx, uint32_t rows, const Mat& relations);

/// Structure of the subgroup of M = (Z/p^a)^r / diag(p^{ambient_orders})
/// generated by the columns of `gens`.
struct SubgroupStructure {
    std::vector<uint32_t> orders;
    Mat gens;  // r x k ambient coordinates of the new (cyclic) generators
};

SubgroupStructure subgroup_structure(const Mat& gens, const std::vector<uint32_t>& ambient_orders);

// Solve gens * x = target modulo the ambient relations diag(p^{ambient_orders}).
std::optional<std::vector<uint64_t>> express(const Mat& gens,
                                             const std::vector<uint32_t>& ambient_orders,
                                             const std::vector<uint64_t>& target);

// diag(p^{orders}) as a relation matrix.
Mat order_relations(const RingContext& ctx, const std::vector<uint32_t>& orders);

}  // namespace iwa
