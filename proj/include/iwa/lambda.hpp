#pragma once

#include <optional>
#include <vector>

#include "iwa/padic.hpp"

namespace iwa {

/// Element of (Z/p^a)[[T]]/(T^m): exactly m coefficients, lowest degree first.
class Series1 {
  public:
    Series1() = default;
    explicit Series1(RingContext ctx) : ctx_(ctx), c_(ctx.m, 0) {}
    Series1(RingContext ctx, std::vector<uint64_t> coeffs);

    static Series1 constant(RingContext ctx, uint64_t v);
    static Series1 one(RingContext ctx) { return constant(ctx, 1); }
    static Series1 variable(RingContext ctx);  // T
    // polynomial from low-degree coefficient list (padded/truncated to m)
    static Series1 from_coeffs(RingContext ctx, const std::vector<uint64_t>& coeffs);

    const RingContext& context() const { return ctx_; }
    uint32_t size() const { return uint32_t(c_.size()); }
    uint64_t coeff(uint32_t i) const { return c_[i]; }
    void set_coeff(uint32_t i, uint64_t v) { c_[i] = v % ctx_.pa; }
    const std::vector<uint64_t>& coeffs() const { return c_; }

    bool is_zero() const;
    bool operator==(const Series1& o) const { return ctx_ == o.ctx_ && c_ == o.c_; }

    Series1 operator+(const Series1& o) const;
    Series1 operator-(const Series1& o) const;
    Series1 operator*(const Series1& o) const;
    Series1 scaled(uint64_t s) const;
    Series1 negated() const;

    // Multiplicative inverse; requires a unit constant term.
    Series1 inverse() const;

    // f(s) for s with constant term divisible by p (substitution stays inside
    // the maximal ideal, so truncation is the only loss).
    Series1 compose(const Series1& s) const;

    // Lowest valuation among coefficients; saturated if zero at precision.
    Valuation content_valuation() const;

    // Degree as a polynomial representative (largest i with c_i != 0), or
    // nullopt for the zero series.
    std::optional<uint32_t> poly_degree() const;

    Series1 with_context(const RingContext& ctx) const;

  private:
    RingContext ctx_;
    std::vector<uint64_t> c_;
};

/// Element of (Z/p^a)[[T1,T2]]/(T1^m, T2^m): m x m coefficient grid,
/// entry (i,j) = coefficient of T1^i T2^j, row-major.
class Series2 {
  public:
    Series2() = default;
    explicit Series2(RingContext ctx);
    static Series2 constant(RingContext ctx, uint64_t v);
    static Series2 variable(RingContext ctx, uint32_t which);  // 1 or 2
    static Series2 from_grid(RingContext ctx, const std::vector<std::vector<uint64_t>>& rows);

    const RingContext& context() const { return ctx_; }
    uint64_t coeff(uint32_t i, uint32_t j) const { return g_[size_t(i) * ctx_.m + j]; }
    void set_coeff(uint32_t i, uint32_t j, uint64_t v) { g_[size_t(i) * ctx_.m + j] = v % ctx_.pa; }

    bool is_zero() const;
    bool operator==(const Series2& o) const { return ctx_ == o.ctx_ && g_ == o.g_; }

    Series2 operator+(const Series2& o) const;
    Series2 operator-(const Series2& o) const;
    Series2 operator*(const Series2& o) const;

    // Row i = coefficient of T1^i as a series in T2 (one-variable context).
    Series1 row(uint32_t i) const;
    void set_row(uint32_t i, const Series1& s);

    Series2 with_context(const RingContext& ctx) const;

  private:
    RingContext ctx_;
    std::vector<uint64_t> g_;
};

/// Z_p-valued character of Gamma restricted through gamma |-> u, u = 1 mod p.
struct Character {
    PadicScalar u;

    static Character make(RingContext ctx, uint64_t u);
    // u^k at precision, k may be negative
    uint64_t power(int64_t k) const;
};

// --- basic Lambda operations ------------------------------------------------

// involution iota: T |-> (1+T)^{-1} - 1, each variable independently.
Series1 involution(const Series1& f);
Series2 involution(const Series2& f);

// twist: T |-> u^k (1+T) - 1.
Series1 twist(const Series1& f, const Character& chi, int64_t k);

// omega_n = (1+T)^{p^n} - 1; requires p^n < m.
Series1 omega(RingContext ctx, uint32_t n);
// omega_{n+1} / omega_n = sum_{i<p} (1+T)^{i p^n}, exact polynomial.
Series1 omega_quotient(RingContext ctx, uint32_t n);

// --- Weierstrass data --------------------------------------------------------

/// f = p^mu * unit * distinguished at precision (p^{a-mu}, T^m).
/// `distinguished` and `unit` live in the reduced context (precision a - mu);
/// mu >= a is rejected as indeterminate.
struct WeierstrassData {
    uint32_t mu = 0;
    uint32_t lambda = 0;
    Series1 distinguished;  // monic of degree lambda, lower coefficients in pZ
    Series1 unit;           // unit constant term
    RingContext reduced_ctx;
};

WeierstrassData weierstrass_prepare(const Series1& f);

std::pair<uint32_t, uint32_t> mu_lambda(const Series1& f);

// p^mu * distinguished, lifted back to the full context.  Characteristic
// series are compared through this form.
Series1 canonical_char(const Series1& f);

// Reconstruct p^mu * unit * distinguished in the full context (for checks).
Series1 weierstrass_reconstruct(const WeierstrassData& w, const RingContext& full_ctx);

// Plain polynomial long division by a monic polynomial of degree d (given as a
// series whose coefficients above d vanish): h = q*P + r with deg r < d.
struct PolyDivision {
    Series1 quotient;
    Series1 remainder;
};
PolyDivision poly_divide_monic(const Series1& h, const Series1& P, uint32_t d);

// Weierstrass division of h by g, where g has a unit coefficient at index
// lambda_g and p-divisible ones below: h = q*g + r, deg r < lambda_g.
// Iterated to a fixed point; iteration cap m, divergence is an error.
PolyDivision weierstrass_divide(const Series1& h, const Series1& g, uint32_t lambda_g);

// h divisible by f at precision (reduced by mu of f)?
bool divides_at_precision(const Series1& f, const Series1& h);
// f and g generate the same ideal at precision.
bool associates_at_precision(const Series1& f, const Series1& g);

// --- the finite level rings (Z/p^a)[T]/(omega_n) -----------------------------

/// Free Z/p^a-module of rank p^n with basis 1, T, ..., T^{p^n - 1} and the
/// ring structure of Lambda/(p^a, omega_n).  All roots-of-unity criteria of
/// the theory are phrased through these rings.
class OmegaRing {
  public:
    OmegaRing(RingContext ctx, uint32_t n);

    const RingContext& context() const { return ctx_; }
    uint32_t level() const { return n_; }
    uint32_t rank() const { return rank_; }

    std::vector<uint64_t> reduce(const Series1& f) const;  // f mod omega_n
    std::vector<uint64_t> one() const;
    std::vector<uint64_t> mul(const std::vector<uint64_t>& x, const std::vector<uint64_t>& y) const;
    // matrix of multiplication by f on the T-power basis
    Mat multiplication_matrix(const Series1& f) const;
    Mat multiplication_matrix_reduced(const std::vector<uint64_t>& fbar) const;
    // matrix of multiplication by 1 + T (the gamma action)
    Mat gamma_matrix() const;
    // ring involution T |-> (1+T)^{p^n - 1} - 1
    std::vector<uint64_t> involute(const std::vector<uint64_t>& x) const;
    // coefficient of gamma^0 when x is written in the group basis (1+T)^i
    uint64_t identity_coefficient(const std::vector<uint64_t>& x) const;

  private:
    RingContext ctx_;
    uint32_t n_;
    uint32_t rank_;
    std::vector<uint64_t> omega_;      // omega_n as polynomial of degree rank_
    Mat group_basis_inverse_;          // T-basis -> group-basis change
    std::vector<uint64_t> invol_sub_;  // (1+T)^{p^n-1} - 1 reduced
};

// Exponent of |Lambda/(f, omega_n)| at the given precision (the cokernel of
// multiplication by f on the omega ring).
uint32_t quotient_order_exponent(const Series1& f, uint32_t n, const RingContext& ctx);

// Is Lambda/(f, omega_n) finite?  Decided by recomputing the order at
// precision a+1 (coefficients lifted canonically) and testing stabilization.
bool cotorsion_test(const Series1& f, uint32_t n);

/// Search results carry an explicit exhausted-range marker instead of an error.
struct SearchResult {
    std::optional<int64_t> value;
    int64_t lo = 0, hi = 0;
    uint32_t n_max = 0;
    bool exhausted() const { return !value.has_value(); }
};

// Smallest k in [lo, hi] with cotorsion_test(twist(H, chi, k), n) for all n <= n_max.
SearchResult admissible_twist_search(const Series1& H, const Character& chi, int64_t lo,
                                     int64_t hi, uint32_t n_max);

// Smallest b in [lo, hi] such that every level-n refinement of
// F((1+T2)^b - 1, T2) is nonzero at precision, n <= n_max.  Refinement n
// works in (Z/p^a)[Y]/(omega_n/omega_{n-1}) coefficients.
SearchResult admissible_line_search(const Series2& F, int64_t lo, int64_t hi, uint32_t n_max);

}  // namespace iwa
