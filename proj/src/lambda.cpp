#include "iwa/lambda.hpp"

#include <algorithm>

namespace iwa {

using modarith::add;
using modarith::inv;
using modarith::mul;
using modarith::neg;
using modarith::pow_u64;
using modarith::sub;

Series1::Series1(RingContext ctx, std::vector<uint64_t> coeffs) : ctx_(ctx), c_(std::move(coeffs)) {
    if (c_.size() != ctx_.m) throw error("series must have exactly m coefficients");
    for (auto& x : c_) x %= ctx_.pa;
}

Series1 Series1::constant(RingContext ctx, uint64_t v) {
    Series1 f(ctx);
    f.c_[0] = v % ctx.pa;
    return f;
}

Series1 Series1::variable(RingContext ctx) {
    if (ctx.m < 2) throw truncation_too_short("m < 2 cannot represent T");
    Series1 f(ctx);
    f.c_[1] = 1;
    return f;
}

Series1 Series1::from_coeffs(RingContext ctx, const std::vector<uint64_t>& coeffs) {
    Series1 f(ctx);
    for (uint32_t i = 0; i < coeffs.size() && i < ctx.m; ++i) f.c_[i] = coeffs[i] % ctx.pa;
    return f;
}

bool Series1::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](uint64_t x) { return x == 0; });
}

Series1 Series1::operator+(const Series1& o) const {
    require_same_context(ctx_, o.ctx_, "series +");
    Series1 r(ctx_);
    for (uint32_t i = 0; i < ctx_.m; ++i) r.c_[i] = add(c_[i], o.c_[i], ctx_.pa);
    return r;
}

Series1 Series1::operator-(const Series1& o) const {
    require_same_context(ctx_, o.ctx_, "series -");
    Series1 r(ctx_);
    for (uint32_t i = 0; i < ctx_.m; ++i) r.c_[i] = sub(c_[i], o.c_[i], ctx_.pa);
    return r;
}

Series1 Series1::operator*(const Series1& o) const {
    require_same_context(ctx_, o.ctx_, "series *");
    Series1 r(ctx_);
    for (uint32_t i = 0; i < ctx_.m; ++i) {
        if (c_[i] == 0) continue;
        for (uint32_t j = 0; i + j < ctx_.m; ++j) {
            if (o.c_[j] == 0) continue;
            r.c_[i + j] = add(r.c_[i + j], mul(c_[i], o.c_[j], ctx_.pa), ctx_.pa);
        }
    }
    return r;
}

Series1 Series1::scaled(uint64_t s) const {
    Series1 r(ctx_);
    for (uint32_t i = 0; i < ctx_.m; ++i) r.c_[i] = mul(c_[i], s % ctx_.pa, ctx_.pa);
    return r;
}

Series1 Series1::negated() const {
    Series1 r(ctx_);
    for (uint32_t i = 0; i < ctx_.m; ++i) r.c_[i] = neg(c_[i], ctx_.pa);
    return r;
}

Series1 Series1::inverse() const {
    if (!modarith::val(c_[0], ctx_.p, ctx_.a).is_unit())
        throw not_invertible("series has non-unit constant term");
    Series1 r(ctx_);
    uint64_t c0 = inv(c_[0], ctx_.pa);
    r.c_[0] = c0;
    for (uint32_t k = 1; k < ctx_.m; ++k) {
        // c_0 r_k = -(sum_{i=1..k} c_i r_{k-i})
        uint64_t s = 0;
        for (uint32_t i = 1; i <= k; ++i) s = add(s, mul(c_[i], r.c_[k - i], ctx_.pa), ctx_.pa);
        r.c_[k] = mul(neg(s, ctx_.pa), c0, ctx_.pa);
    }
    return r;
}

Series1 Series1::compose(const Series1& s) const {
    require_same_context(ctx_, s.ctx_, "series compose");
    if (modarith::val(s.c_[0], ctx_.p, ctx_.a).is_unit())
        throw error("substitution must have constant term in pZ");
    Series1 r = Series1::constant(ctx_, c_[ctx_.m - 1]);
    for (int32_t i = int32_t(ctx_.m) - 2; i >= 0; --i) {
        r = r * s;
        r.c_[0] = add(r.c_[0], c_[i], ctx_.pa);
    }
    return r;
}

Valuation Series1::content_valuation() const {
    uint32_t best = ctx_.a;
    bool any = false;
    for (uint64_t x : c_) {
        Valuation v = modarith::val(x, ctx_.p, ctx_.a);
        if (!v.saturated) {
            any = true;
            best = std::min(best, v.value);
        }
    }
    return {best, !any};
}

std::optional<uint32_t> Series1::poly_degree() const {
    for (int32_t i = int32_t(ctx_.m) - 1; i >= 0; --i)
        if (c_[i] != 0) return uint32_t(i);
    return std::nullopt;
}

Series1 Series1::with_context(const RingContext& ctx) const {
    if (ctx.p != ctx_.p) throw context_mismatch("with_context requires equal p");
    Series1 r(ctx);
    for (uint32_t i = 0; i < std::min(ctx.m, ctx_.m); ++i) r.c_[i] = c_[i] % ctx.pa;
    return r;
}

// --- Series2 -----------------------------------------------------------------

Series2::Series2(RingContext ctx) : ctx_(ctx), g_(size_t(ctx.m) * ctx.m, 0) {
    if (ctx.vars != 2) throw context_mismatch("Series2 requires a two-variable context");
}

Series2 Series2::constant(RingContext ctx, uint64_t v) {
    Series2 f(ctx);
    f.g_[0] = v % ctx.pa;
    return f;
}

Series2 Series2::variable(RingContext ctx, uint32_t which) {
    Series2 f(ctx);
    if (ctx.m < 2) throw truncation_too_short("m < 2 cannot represent a variable");
    if (which == 1)
        f.set_coeff(1, 0, 1);
    else if (which == 2)
        f.set_coeff(0, 1, 1);
    else
        throw input_error("variable index must be 1 or 2");
    return f;
}

Series2 Series2::from_grid(RingContext ctx, const std::vector<std::vector<uint64_t>>& rows) {
    Series2 f(ctx);
    for (uint32_t i = 0; i < rows.size() && i < ctx.m; ++i)
        for (uint32_t j = 0; j < rows[i].size() && j < ctx.m; ++j) f.set_coeff(i, j, rows[i][j]);
    return f;
}

bool Series2::is_zero() const {
    return std::all_of(g_.begin(), g_.end(), [](uint64_t x) { return x == 0; });
}

Series2 Series2::operator+(const Series2& o) const {
    require_same_context(ctx_, o.ctx_, "series2 +");
    Series2 r(ctx_);
    for (size_t i = 0; i < g_.size(); ++i) r.g_[i] = add(g_[i], o.g_[i], ctx_.pa);
    return r;
}

Series2 Series2::operator-(const Series2& o) const {
    require_same_context(ctx_, o.ctx_, "series2 -");
    Series2 r(ctx_);
    for (size_t i = 0; i < g_.size(); ++i) r.g_[i] = sub(g_[i], o.g_[i], ctx_.pa);
    return r;
}

Series2 Series2::operator*(const Series2& o) const {
    require_same_context(ctx_, o.ctx_, "series2 *");
    Series2 r(ctx_);
    const uint32_t m = ctx_.m;
    for (uint32_t i1 = 0; i1 < m; ++i1)
        for (uint32_t j1 = 0; j1 < m; ++j1) {
            uint64_t x = coeff(i1, j1);
            if (x == 0) continue;
            for (uint32_t i2 = 0; i1 + i2 < m; ++i2)
                for (uint32_t j2 = 0; j1 + j2 < m; ++j2) {
                    uint64_t y = o.coeff(i2, j2);
                    if (y == 0) continue;
                    uint64_t& slot = r.g_[size_t(i1 + i2) * m + (j1 + j2)];
                    slot = add(slot, mul(x, y, ctx_.pa), ctx_.pa);
                }
        }
    return r;
}

Series1 Series2::row(uint32_t i) const {
    RingContext c1 = RingContext::make(ctx_.p, ctx_.a, ctx_.m, 1);
    Series1 r(c1);
    for (uint32_t j = 0; j < ctx_.m; ++j) r.set_coeff(j, coeff(i, j));
    return r;
}

void Series2::set_row(uint32_t i, const Series1& s) {
    for (uint32_t j = 0; j < ctx_.m; ++j) set_coeff(i, j, s.coeff(j));
}

Series2 Series2::with_context(const RingContext& ctx) const {
    if (ctx.p != ctx_.p) throw context_mismatch("with_context requires equal p");
    Series2 r(ctx);
    for (uint32_t i = 0; i < std::min(ctx.m, ctx_.m); ++i)
        for (uint32_t j = 0; j < std::min(ctx.m, ctx_.m); ++j)
            r.set_coeff(i, j, coeff(i, j) % ctx.pa);
    return r;
}

// --- Character ---------------------------------------------------------------

Character Character::make(RingContext ctx, uint64_t u) {
    u %= ctx.pa;
    if (!modarith::val(u, ctx.p, ctx.a).is_unit())
        throw input_error("character value must be a unit");
    if (u % ctx.p != 1) throw input_error("character value must be 1 mod p");
    return Character{PadicScalar(ctx, u)};
}

uint64_t Character::power(int64_t k) const {
    const RingContext& ctx = u.ctx;
    uint64_t base = k >= 0 ? u.r : inv(u.r, ctx.pa);
    uint64_t e = uint64_t(k >= 0 ? k : -k);
    return modarith::pow(base, e, ctx.pa);
}

// --- involution / twist / omega ----------------------------------------------

namespace {

// (1+T)^{-1} - 1 = -T + T^2 - T^3 + ...
Series1 involution_substitution(RingContext ctx) {
    Series1 s(ctx);
    for (uint32_t i = 1; i < ctx.m; ++i) s.set_coeff(i, i % 2 ? ctx.pa - 1 : 1);
    return s;
}

Series1 one_plus_T_power(RingContext ctx, uint64_t e) {
    // binary power of (1+T) in the truncated ring
    Series1 base = Series1::one(ctx) + Series1::variable(ctx);
    Series1 r = Series1::one(ctx);
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

}  // namespace

Series1 involution(const Series1& f) { return f.compose(involution_substitution(f.context())); }

Series2 involution(const Series2& f) {
    const RingContext& ctx = f.context();
    RingContext c1 = RingContext::make(ctx.p, ctx.a, ctx.m, 1);
    Series1 s = involution_substitution(c1);
    // substitute in T2 row-wise, then in T1 by a Horner pass over rows
    Series2 tmp(ctx);
    for (uint32_t i = 0; i < ctx.m; ++i) tmp.set_row(i, f.row(i).compose(s));
    Series2 s1(ctx);  // iota(T1) as a two-variable series
    for (uint32_t i = 1; i < ctx.m; ++i) s1.set_coeff(i, 0, i % 2 ? ctx.pa - 1 : 1);
    Series2 r(ctx);
    for (uint32_t j = 0; j < ctx.m; ++j) r.set_coeff(0, j, tmp.coeff(ctx.m - 1, j));
    for (int32_t i = int32_t(ctx.m) - 2; i >= 0; --i) {
        r = r * s1;
        for (uint32_t j = 0; j < ctx.m; ++j)
            r.set_coeff(0, j, add(r.coeff(0, j), tmp.coeff(uint32_t(i), j), ctx.pa));
    }
    return r;
}

Series1 twist(const Series1& f, const Character& chi, int64_t k) {
    const RingContext& ctx = f.context();
    require_same_context(ctx, chi.u.ctx, "twist");
    uint64_t uk = chi.power(k);
    Series1 s(ctx);
    s.set_coeff(0, sub(uk, 1, ctx.pa));  // u^k - 1, divisible by p
    if (ctx.m > 1) s.set_coeff(1, uk);
    return f.compose(s);
}

Series1 omega(RingContext ctx, uint32_t n) {
    uint64_t pn = pow_u64(ctx.p, n);
    if (pn >= ctx.m) throw truncation_too_short("omega_n needs m > p^n");
    return one_plus_T_power(ctx, pn) - Series1::one(ctx);
}

Series1 omega_quotient(RingContext ctx, uint32_t n) {
    uint64_t pn = pow_u64(ctx.p, n);
    if (pn * (ctx.p - 1) >= ctx.m)
        throw truncation_too_short("omega_{n+1}/omega_n needs m > p^n (p-1)");
    Series1 r(ctx);
    for (uint32_t i = 0; i < ctx.p; ++i) r = r + one_plus_T_power(ctx, uint64_t(i) * pn);
    return r;
}

// --- Weierstrass -------------------------------------------------------------

PolyDivision poly_divide_monic(const Series1& h, const Series1& P, uint32_t d) {
    const RingContext& ctx = h.context();
    require_same_context(ctx, P.context(), "poly_divide_monic");
    if (d >= ctx.m) throw truncation_too_short("divisor degree exceeds truncation");
    if (P.coeff(d) != 1 % ctx.pa) throw error("poly_divide_monic needs a monic divisor");
    for (uint32_t i = d + 1; i < ctx.m; ++i)
        if (P.coeff(i) != 0) throw error("poly_divide_monic divisor has spurious high terms");
    Series1 r = h;
    Series1 q(ctx);
    for (int32_t i = int32_t(ctx.m) - 1; i >= int32_t(d); --i) {
        uint64_t lead = r.coeff(uint32_t(i));
        if (lead == 0) continue;
        uint32_t shift = uint32_t(i) - d;
        q.set_coeff(shift, add(q.coeff(shift), lead, ctx.pa));
        for (uint32_t j = 0; j <= d; ++j) {
            uint64_t t = mul(lead, P.coeff(j), ctx.pa);
            r.set_coeff(shift + j, sub(r.coeff(shift + j), t, ctx.pa));
        }
    }
    return {std::move(q), std::move(r)};
}

PolyDivision weierstrass_divide(const Series1& h, const Series1& g, uint32_t lambda_g) {
    const RingContext& ctx = h.context();
    require_same_context(ctx, g.context(), "weierstrass_divide");
    if (lambda_g >= ctx.m) throw truncation_too_short("lambda exceeds truncation");
    if (!modarith::val(g.coeff(lambda_g), ctx.p, ctx.a).is_unit())
        throw error("weierstrass_divide: pivot coefficient is not a unit");
    if (lambda_g == 0) {
        Series1 q = h * g.inverse();
        return {std::move(q), Series1(ctx)};
    }
    // g = A + T^lambda V with A below lambda (coefficients in pZ for prepared
    // inputs) and V a unit
    Series1 V(ctx), A(ctx);
    for (uint32_t i = lambda_g; i < ctx.m; ++i) V.set_coeff(i - lambda_g, g.coeff(i));
    for (uint32_t i = 0; i < lambda_g; ++i) A.set_coeff(i, g.coeff(i));
    Series1 W = V.inverse();

    Series1 q(ctx);
    Series1 r = h;
    for (uint32_t iter = 0; iter <= ctx.m; ++iter) {
        Series1 high(ctx), low(ctx);
        bool high_zero = true;
        for (uint32_t i = 0; i < ctx.m; ++i) {
            if (i < lambda_g)
                low.set_coeff(i, r.coeff(i));
            else {
                high.set_coeff(i - lambda_g, r.coeff(i));
                if (r.coeff(i) != 0) high_zero = false;
            }
        }
        if (high_zero) return {std::move(q), std::move(r)};
        Series1 step = high * W;
        q = q + step;
        r = low - step * A;
    }
    throw undetermined_at_precision("Weierstrass division did not stabilize within the cap");
}

WeierstrassData weierstrass_prepare(const Series1& f) {
    const RingContext& ctx = f.context();
    Valuation content = f.content_valuation();
    if (content.saturated)
        throw indeterminate_at_precision("series is zero at the declared precision");
    uint32_t mu = content.value;
    if (mu >= ctx.a) throw indeterminate_at_precision("mu consumes all p-adic precision");
    RingContext rctx = ctx.reduced(mu);
    Series1 g(rctx);
    for (uint32_t i = 0; i < ctx.m; ++i) {
        uint64_t c = f.coeff(i);
        Valuation v = modarith::val(c, ctx.p, ctx.a);
        uint64_t cr = v.saturated ? 0 : modarith::div_pow_p(c, ctx.p, mu) % rctx.pa;
        // coefficients of valuation >= a - mu die in the reduced ring
        g.set_coeff(i, cr);
    }
    std::optional<uint32_t> lam;
    for (uint32_t i = 0; i < rctx.m; ++i)
        if (modarith::val(g.coeff(i), rctx.p, rctx.a).is_unit()) {
            lam = i;
            break;
        }
    if (!lam)
        throw truncation_too_short("no unit coefficient below the truncation (lambda >= m)");

    WeierstrassData w;
    w.mu = mu;
    w.lambda = *lam;
    w.reduced_ctx = rctx;
    if (*lam == 0) {
        w.distinguished = Series1::one(rctx);
        w.unit = g;
        return w;
    }
    Series1 Tlam(rctx);
    Tlam.set_coeff(*lam, 1);
    PolyDivision d = weierstrass_divide(Tlam, g, *lam);
    w.distinguished = Tlam - d.remainder;
    if (!modarith::val(d.quotient.coeff(0), rctx.p, rctx.a).is_unit())
        throw undetermined_at_precision("Weierstrass quotient is not a unit at precision");
    w.unit = d.quotient.inverse();
    return w;
}

std::pair<uint32_t, uint32_t> mu_lambda(const Series1& f) {
    WeierstrassData w = weierstrass_prepare(f);
    return {w.mu, w.lambda};
}

Series1 canonical_char(const Series1& f) {
    const RingContext& ctx = f.context();
    WeierstrassData w = weierstrass_prepare(f);
    uint64_t pmu = pow_u64(ctx.p, w.mu);
    Series1 r(ctx);
    for (uint32_t i = 0; i < ctx.m; ++i) r.set_coeff(i, w.distinguished.coeff(i) * pmu % ctx.pa);
    return r;
}

Series1 weierstrass_reconstruct(const WeierstrassData& w, const RingContext& full_ctx) {
    Series1 prod = w.unit * w.distinguished;
    uint64_t pmu = pow_u64(full_ctx.p, w.mu);
    Series1 r(full_ctx);
    for (uint32_t i = 0; i < full_ctx.m; ++i) r.set_coeff(i, prod.coeff(i) * pmu % full_ctx.pa);
    return r;
}

bool divides_at_precision(const Series1& f, const Series1& h) {
    const RingContext& ctx = f.context();
    require_same_context(ctx, h.context(), "divides_at_precision");
    if (h.is_zero()) return true;
    WeierstrassData w = weierstrass_prepare(f);
    // every coefficient of h must absorb p^mu
    Valuation hc = h.content_valuation();
    if (!hc.saturated && hc.value < w.mu) return false;
    Series1 hr(w.reduced_ctx);
    for (uint32_t i = 0; i < ctx.m; ++i) {
        uint64_t c = h.coeff(i);
        Valuation v = modarith::val(c, ctx.p, ctx.a);
        hr.set_coeff(i, v.saturated ? 0 : modarith::div_pow_p(c, ctx.p, w.mu) % w.reduced_ctx.pa);
    }
    PolyDivision d = poly_divide_monic(hr, w.distinguished, w.lambda);
    return d.remainder.is_zero();
}

bool associates_at_precision(const Series1& f, const Series1& g) {
    return divides_at_precision(f, g) && divides_at_precision(g, f);
}

// --- OmegaRing ----------------------------------------------------------------

OmegaRing::OmegaRing(RingContext ctx, uint32_t n) : ctx_(ctx), n_(n) {
    uint64_t pn = pow_u64(ctx.p, n);
    if (pn >= ctx.m) throw truncation_too_short("OmegaRing needs m > p^n");
    rank_ = uint32_t(pn);
    Series1 om = omega(ctx, n);
    omega_.assign(rank_ + 1, 0);
    for (uint32_t i = 0; i <= rank_; ++i) omega_[i] = om.coeff(i);

    // group basis change: column i = (1+T)^i reduced (polynomial of degree <= i)
    Mat B(ctx, rank_, rank_);
    std::vector<uint64_t> cur = one();
    std::vector<uint64_t> gammav(rank_, 0);
    gammav[0] = 1;
    if (rank_ > 1) gammav[1] = 1;
    for (uint32_t j = 0; j < rank_; ++j) {
        for (uint32_t i = 0; i < rank_; ++i) B.at(i, j) = cur[i];
        if (j + 1 < rank_) cur = mul(cur, gammav);
    }
    group_basis_inverse_ = inverse(B);

    // (1+T)^{p^n - 1} - 1: the inverse of 1+T in this ring is (1+T)^{p^n - 1}
    std::vector<uint64_t> s = one();
    for (uint64_t i = 0; i + 1 < pn; ++i) s = mul(s, gammav);
    s[0] = sub(s[0], 1, ctx.pa);
    invol_sub_ = std::move(s);
}

std::vector<uint64_t> OmegaRing::one() const {
    std::vector<uint64_t> v(rank_, 0);
    v[0] = 1 % ctx_.pa;
    return v;
}

std::vector<uint64_t> OmegaRing::reduce(const Series1& f) const {
    require_same_context(ctx_, f.context(), "OmegaRing::reduce");
    // long division of the polynomial representative by monic omega_n
    std::vector<uint64_t> r(f.coeffs());
    for (int32_t i = int32_t(ctx_.m) - 1; i >= int32_t(rank_); --i) {
        uint64_t lead = r[uint32_t(i)];
        if (lead == 0) continue;
        uint32_t shift = uint32_t(i) - rank_;
        for (uint32_t j = 0; j <= rank_; ++j)
            r[shift + j] = sub(r[shift + j], modarith::mul(lead, omega_[j], ctx_.pa), ctx_.pa);
    }
    r.resize(rank_);
    return r;
}

std::vector<uint64_t> OmegaRing::mul(const std::vector<uint64_t>& x,
                                     const std::vector<uint64_t>& y) const {
    std::vector<uint64_t> prod(2 * rank_, 0);
    for (uint32_t i = 0; i < rank_; ++i) {
        if (x[i] == 0) continue;
        for (uint32_t j = 0; j < rank_; ++j) {
            if (y[j] == 0) continue;
            prod[i + j] = add(prod[i + j], modarith::mul(x[i], y[j], ctx_.pa), ctx_.pa);
        }
    }
    for (int32_t i = int32_t(2 * rank_) - 1; i >= int32_t(rank_); --i) {
        uint64_t lead = prod[uint32_t(i)];
        if (lead == 0) continue;
        uint32_t shift = uint32_t(i) - rank_;
        for (uint32_t j = 0; j <= rank_; ++j)
            prod[shift + j] = sub(prod[shift + j], modarith::mul(lead, omega_[j], ctx_.pa), ctx_.pa);
    }
    prod.resize(rank_);
    return prod;
}

Mat OmegaRing::multiplication_matrix(const Series1& f) const {
    return multiplication_matrix_reduced(reduce(f));
}

Mat OmegaRing::multiplication_matrix_reduced(const std::vector<uint64_t>& fbar) const {
    Mat M(ctx_, rank_, rank_);
    std::vector<uint64_t> col = fbar;
    std::vector<uint64_t> tvec(rank_, 0);
    if (rank_ > 1) tvec[1] = 1;
    for (uint32_t j = 0; j < rank_; ++j) {
        for (uint32_t i = 0; i < rank_; ++i) M.at(i, j) = col[i];
        if (j + 1 < rank_) col = mul(col, tvec);
    }
    return M;
}

Mat OmegaRing::gamma_matrix() const {
    std::vector<uint64_t> g(rank_, 0);
    g[0] = 1;
    if (rank_ > 1) g[1] = 1;
    return multiplication_matrix_reduced(g);
}

std::vector<uint64_t> OmegaRing::involute(const std::vector<uint64_t>& x) const {
    // evaluate the polynomial x at the substitution image by Horner
    std::vector<uint64_t> r(rank_, 0);
    r[0] = x[rank_ - 1];
    for (int32_t i = int32_t(rank_) - 2; i >= 0; --i) {
        r = mul(r, invol_sub_);
        r[0] = add(r[0], x[uint32_t(i)], ctx_.pa);
    }
    return r;
}

uint64_t OmegaRing::identity_coefficient(const std::vector<uint64_t>& x) const {
    uint64_t acc = 0;
    for (uint32_t j = 0; j < rank_; ++j)
        acc = add(acc, modarith::mul(group_basis_inverse_.at(0, j), x[j], ctx_.pa), ctx_.pa);
    return acc;
}

// --- cotorsion and admissibility ----------------------------------------------

uint32_t quotient_order_exponent(const Series1& f, uint32_t n, const RingContext& ctx) {
    OmegaRing R(ctx, n);
    Mat M = R.multiplication_matrix(f.with_context(ctx));
    auto exps = cokernel_exponents(M);
    uint32_t e = 0;
    for (uint32_t x : exps) e += x;
    return e;
}

bool cotorsion_test(const Series1& f, uint32_t n) {
    const RingContext& ctx = f.context();
    if (f.is_zero()) return false;
    uint32_t ea = quotient_order_exponent(f, n, ctx);
    uint32_t eb = quotient_order_exponent(f, n, ctx.lifted());
    return ea == eb;
}

SearchResult admissible_twist_search(const Series1& H, const Character& chi, int64_t lo,
                                     int64_t hi, uint32_t n_max) {
    if (H.is_zero()) throw indeterminate_at_precision("twist search needs a nonzero series");
    SearchResult res;
    res.lo = lo;
    res.hi = hi;
    res.n_max = n_max;
    for (int64_t k = lo; k <= hi; ++k) {
        Series1 g = twist(H, chi, k);
        bool ok = true;
        for (uint32_t n = 0; n <= n_max && ok; ++n) ok = cotorsion_test(g, n);
        if (ok) {
            res.value = k;
            return res;
        }
    }
    return res;
}

namespace {

// Element of (Z/p^a)[Y]/(Phi) [[T2]]/(T2^m): data[t2][y].
struct RefinementRing {
    RingContext ctx;
    std::vector<uint64_t> phi;  // monic, degree d
    uint32_t d;

    using Elt = std::vector<std::vector<uint64_t>>;

    Elt zero() const { return Elt(ctx.m, std::vector<uint64_t>(d, 0)); }

    Elt mul(const Elt& x, const Elt& y) const {
        Elt r = zero();
        std::vector<uint64_t> tmp(2 * d, 0);
        for (uint32_t i = 0; i < ctx.m; ++i)
            for (uint32_t j = 0; i + j < ctx.m; ++j) {
                std::fill(tmp.begin(), tmp.end(), 0);
                bool any = false;
                for (uint32_t s = 0; s < d; ++s) {
                    if (x[i][s] == 0) continue;
                    for (uint32_t t = 0; t < d; ++t) {
                        if (y[j][t] == 0) continue;
                        tmp[s + t] = add(tmp[s + t], modarith::mul(x[i][s], y[j][t], ctx.pa), ctx.pa);
                        any = true;
                    }
                }
                if (!any) continue;
                for (int32_t s = int32_t(2 * d) - 1; s >= int32_t(d); --s) {
                    uint64_t lead = tmp[uint32_t(s)];
                    if (lead == 0) continue;
                    uint32_t shift = uint32_t(s) - d;
                    for (uint32_t t = 0; t <= d; ++t)
                        tmp[shift + t] =
                            sub(tmp[shift + t], modarith::mul(lead, phi[t], ctx.pa), ctx.pa);
                }
                auto& slot = r[i + j];
                for (uint32_t t = 0; t < d; ++t) slot[t] = add(slot[t], tmp[t], ctx.pa);
            }
        return r;
    }

    bool is_zero(const Elt& x) const {
        for (const auto& row : x)
            for (uint64_t v : row)
                if (v) return false;
        return true;
    }
};

}  // namespace

SearchResult admissible_line_search(const Series2& F, int64_t lo, int64_t hi, uint32_t n_max) {
    const RingContext& ctx = F.context();
    if (F.is_zero()) throw indeterminate_at_precision("line search needs a nonzero series");
    RingContext c1 = RingContext::make(ctx.p, ctx.a, ctx.m, 1);
    SearchResult res;
    res.lo = lo;
    res.hi = hi;
    res.n_max = n_max;

    // refinement moduli Phi_n = omega_n / omega_{n-1} (Phi_0 = Y)
    std::vector<std::vector<uint64_t>> phis;
    for (uint32_t n = 0; n <= n_max; ++n) {
        if (n == 0) {
            phis.push_back({0, 1});
            continue;
        }
        Series1 num = omega(c1, n);
        Series1 den = omega(c1, n - 1);
        uint32_t dden = uint32_t(pow_u64(ctx.p, n - 1));
        PolyDivision d = poly_divide_monic(num, den, dden);
        if (!d.remainder.is_zero()) throw error("internal: omega quotient not exact");
        uint32_t dphi = uint32_t(pow_u64(ctx.p, n) - pow_u64(ctx.p, n - 1));
        std::vector<uint64_t> phi(dphi + 1, 0);
        for (uint32_t i = 0; i <= dphi; ++i) phi[i] = d.quotient.coeff(i);
        phis.push_back(std::move(phi));
    }

    for (int64_t b = lo; b <= hi; ++b) {
        bool ok = true;
        // level 0: plain substitution T1 -> (1+T2)^b - 1
        {
            Series1 pw = Series1::one(c1);
            Series1 base = Series1::one(c1) + Series1::variable(c1);
            if (b < 0) base = base.inverse();
            uint64_t e = uint64_t(b >= 0 ? b : -b);
            while (e) {
                if (e & 1) pw = pw * base;
                base = base * base;
                e >>= 1;
            }
            Series1 s = pw - Series1::one(c1);
            Series1 g(c1);
            g = F.row(ctx.m - 1);
            for (int32_t i = int32_t(ctx.m) - 2; i >= 0; --i) g = g * s + F.row(uint32_t(i));
            if (g.is_zero()) ok = false;
        }
        for (uint32_t n = 1; n <= n_max && ok; ++n) {
            RefinementRing R{c1, phis[n], uint32_t(phis[n].size() - 1)};
            // s = (1+Y)(1+T2)^b - 1
            RefinementRing::Elt s = R.zero();
            {
                Series1 pw = Series1::one(c1);
                Series1 base = Series1::one(c1) + Series1::variable(c1);
                if (b < 0) base = base.inverse();
                uint64_t e = uint64_t(b >= 0 ? b : -b);
                while (e) {
                    if (e & 1) pw = pw * base;
                    base = base * base;
                    e >>= 1;
                }
                for (uint32_t t = 0; t < ctx.m; ++t) {
                    s[t][0] = pw.coeff(t);
                    if (R.d > 1) s[t][1] = pw.coeff(t);
                }
                s[0][0] = sub(s[0][0], 1, ctx.pa);
            }
            RefinementRing::Elt g = R.zero();
            {
                Series1 top = F.row(ctx.m - 1);
                for (uint32_t t = 0; t < ctx.m; ++t) g[t][0] = top.coeff(t);
            }
            for (int32_t i = int32_t(ctx.m) - 2; i >= 0; --i) {
                g = R.mul(g, s);
                Series1 row = F.row(uint32_t(i));
                for (uint32_t t = 0; t < ctx.m; ++t) g[t][0] = add(g[t][0], row.coeff(t), ctx.pa);
            }
            if (R.is_zero(g)) ok = false;
        }
        if (ok) {
            res.value = b;
            return res;
        }
    }
    return res;
}

}  // namespace iwa
