#include "iwa/pairing.hpp"

#include <algorithm>

namespace iwa {

using modarith::add;
using modarith::div_pow_p;
using modarith::inv;
using modarith::mul;
using modarith::neg;
using modarith::pow_u64;
using modarith::sub;

// --- FracClass -----------------------------------------------------------------

FracClass make_frac_class(const Series1& num, const Series1& den) {
    const RingContext& ctx = num.context();
    require_same_context(ctx, den.context(), "make_frac_class");
    if (den.is_zero()) throw indeterminate_at_precision("denominator vanishes at precision");
    WeierstrassData w = weierstrass_prepare(den);
    FracClass c;
    c.den_mu = w.mu;
    c.den_lambda = w.lambda;
    c.den = canonical_char(den);
    // absorb the unit into the numerator (canonical lift of the reduced inverse)
    Series1 uinv_lift(ctx);
    Series1 uinv = w.unit.inverse();
    for (uint32_t i = 0; i < ctx.m; ++i) uinv_lift.set_coeff(i, uinv.coeff(i));
    Series1 g = num * uinv_lift;
    // canonical coset representative modulo p^mu * P
    Series1 P_lift(ctx);
    for (uint32_t i = 0; i < ctx.m; ++i) P_lift.set_coeff(i, w.distinguished.coeff(i));
    PolyDivision d = poly_divide_monic(g, P_lift, w.lambda);
    Series1 qmod(ctx);
    if (w.mu > 0) {
        uint64_t pmu = pow_u64(ctx.p, w.mu);
        for (uint32_t i = 0; i < ctx.m; ++i) qmod.set_coeff(i, d.quotient.coeff(i) % pmu);
    }
    c.num = d.remainder + qmod * P_lift;
    return c;
}

FracClass frac_scale(const FracClass& c, const Series1& g) {
    return make_frac_class(c.num * g, c.den);
}

FracClass frac_add(const FracClass& x, const FracClass& y) {
    return make_frac_class(x.num * y.den + y.num * x.den, x.den * y.den);
}

FracClass frac_involute(const FracClass& c) {
    return make_frac_class(involution(c.num), involution(c.den));
}

bool frac_equal(const FracClass& x, const FracClass& y) {
    return x.den == y.den && x.num == y.num;
}

// --- forms ----------------------------------------------------------------------

SesquiForm make_sesqui_form(ElementaryModule left, ElementaryModule right,
                            std::vector<FracClass> entries) {
    if (entries.size() != left.factors.size() * right.factors.size())
        throw input_error("sesquilinear form needs rank_left x rank_right entries");
    return SesquiForm{std::move(left), std::move(right), std::move(entries)};
}

SesquiForm twist_form(const SesquiForm& theta, const Character& chi, int64_t k) {
    ElementaryModule L{theta.left.ctx, {}}, R{theta.right.ctx, {}};
    for (const Series1& f : theta.left.factors) L.factors.push_back(twist(f, chi, k));
    for (const Series1& f : theta.right.factors) R.factors.push_back(twist(f, chi, k));
    std::vector<FracClass> entries;
    for (const FracClass& c : theta.entries)
        entries.push_back(make_frac_class(twist(c.num, chi, k), twist(c.den, chi, k)));
    return make_sesqui_form(std::move(L), std::move(R), std::move(entries));
}

SesquiForm swap_partner(const SesquiForm& theta) {
    const uint32_t r = uint32_t(theta.left.factors.size());
    const uint32_t c = uint32_t(theta.right.factors.size());
    std::vector<FracClass> entries;
    entries.reserve(size_t(r) * c);
    for (uint32_t j = 0; j < c; ++j)
        for (uint32_t i = 0; i < r; ++i) entries.push_back(frac_involute(theta.at(i, j)));
    return make_sesqui_form(theta.right, theta.left, std::move(entries));
}

RationalModZ rational_mod_z(uint64_t num, uint32_t den_exp, uint32_t p) {
    uint64_t q = pow_u64(p, den_exp);
    num %= q;
    if (num == 0) return {0, 0};
    while (den_exp > 0 && num % p == 0) {
        num /= p;
        --den_exp;
    }
    if (den_exp == 0) return {0, 0};
    return {num, den_exp};
}

RationalModZ rational_add(const RationalModZ& x, const RationalModZ& y, uint32_t p) {
    uint32_t k = std::max(x.den_exp, y.den_exp);
    uint64_t nx = x.num * pow_u64(p, k - x.den_exp);
    uint64_t ny = y.num * pow_u64(p, k - y.den_exp);
    return rational_mod_z(nx + ny, k, p);
}

RationalModZ rational_scale(const RationalModZ& x, uint64_t c, uint32_t p) {
    if (x.den_exp == 0) return {0, 0};
    uint64_t q = pow_u64(p, x.den_exp);
    return rational_mod_z(mul(x.num, c % q, q), x.den_exp, p);
}

bool rational_eq(const RationalModZ& x, const RationalModZ& y) {
    return x.num == y.num && x.den_exp == y.den_exp;
}

FiniteForm make_finite_form(FiniteModule left, FiniteModule right,
                            std::vector<RationalModZ> values, bool galois, bool alternating) {
    if (values.size() != size_t(left.rank()) * right.rank())
        throw input_error("finite form needs rank_left x rank_right values");
    for (uint32_t i = 0; i < left.rank(); ++i)
        for (uint32_t j = 0; j < right.rank(); ++j) {
            const RationalModZ& v = values[size_t(i) * right.rank() + j];
            if (v.den_exp > std::min(left.orders[i], right.orders[j]))
                throw input_error("form value is not killed by the generator orders");
        }
    return FiniteForm{std::move(left), std::move(right), std::move(values), galois, alternating};
}

RationalModZ finite_form_value(const FiniteForm& f, const std::vector<uint64_t>& x,
                               const std::vector<uint64_t>& y) {
    const uint32_t p = f.left.ctx.p;
    if (x.size() != f.left.rank() || y.size() != f.right.rank())
        throw error("dimension mismatch in finite_form_value");
    RationalModZ acc{0, 0};
    for (uint32_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        for (uint32_t j = 0; j < y.size(); ++j) {
            if (y[j] == 0) continue;
            RationalModZ t = rational_scale(f.at(i, j), x[i], p);
            t = rational_scale(t, y[j], p);
            acc = rational_add(acc, t, p);
        }
    }
    return acc;
}

FiniteForm direct_sum(const FiniteForm& a, const FiniteForm& b) {
    FiniteModule L = direct_sum(a.left, b.left);
    FiniteModule R = direct_sum(a.right, b.right);
    // mirror the stable order-sort used by the module direct sum
    auto positions = [](const FiniteModule& x, const FiniteModule& y) {
        std::vector<std::pair<uint32_t, std::pair<bool, uint32_t>>> tagged;
        for (uint32_t i = 0; i < x.rank(); ++i) tagged.push_back({x.orders[i], {false, i}});
        for (uint32_t i = 0; i < y.rank(); ++i) tagged.push_back({y.orders[i], {true, i}});
        std::stable_sort(tagged.begin(), tagged.end(),
                         [](const auto& u, const auto& v) { return u.first > v.first; });
        return tagged;
    };
    auto lt = positions(a.left, b.left);
    auto rt = positions(a.right, b.right);
    std::vector<RationalModZ> vals(size_t(L.rank()) * R.rank(), RationalModZ{0, 0});
    for (uint32_t i = 0; i < L.rank(); ++i)
        for (uint32_t j = 0; j < R.rank(); ++j) {
            if (lt[i].second.first != rt[j].second.first) continue;
            const FiniteForm& src = lt[i].second.first ? b : a;
            vals[size_t(i) * R.rank() + j] = src.at(lt[i].second.second, rt[j].second.second);
        }
    return make_finite_form(std::move(L), std::move(R), std::move(vals),
                            a.galois_compatible && b.galois_compatible,
                            a.alternating && b.alternating);
}

// --- torsion specialization -------------------------------------------------------

namespace {

// Division by a level-ring element that is invertible after tensoring with Q:
// apply_scaled(t) returns z with (den) * z = p^{max_exp} * t, so the true value
// is z / p^{max_exp}.
struct OmegaInverter {
    const OmegaRing* ring;
    SmithForm snf;
    uint32_t max_exp = 0;
    bool singular = false;

    OmegaInverter(const OmegaRing& R, const Series1& den) : ring(&R) {
        Mat H = R.multiplication_matrix(den);
        snf = smith_normal_form(H);
        for (uint32_t e : snf.exponents) {
            if (e >= R.context().a) singular = true;
            max_exp = std::max(max_exp, e);
        }
    }

    std::vector<uint64_t> apply_scaled(const std::vector<uint64_t>& t) const {
        const RingContext& ctx = ring->context();
        std::vector<uint64_t> w = snf.left.apply(t);
        for (uint32_t i = 0; i < w.size(); ++i)
            w[i] = mul(w[i], pow_u64(ctx.p, max_exp - snf.exponents[i]) % ctx.pa, ctx.pa);
        return snf.right.apply(w);
    }
};

std::vector<uint64_t> block_component(const std::vector<uint64_t>& ambient, uint32_t block,
                                      uint32_t rank) {
    std::vector<uint64_t> v(rank);
    for (uint32_t i = 0; i < rank; ++i) v[i] = ambient[size_t(block) * rank + i];
    return v;
}

bool all_zero(const std::vector<uint64_t>& v) {
    return std::all_of(v.begin(), v.end(), [](uint64_t x) { return x == 0; });
}

}  // namespace

RationalModZ torsion_value_ambient(const SesquiForm& theta, uint32_t n,
                                   const std::vector<uint64_t>& x,
                                   const std::vector<uint64_t>& y) {
    const RingContext& ctx = theta.left.ctx;
    OmegaRing R(ctx, n);
    const uint32_t rk = R.rank();
    const uint32_t dl = uint32_t(theta.left.factors.size());
    const uint32_t dr = uint32_t(theta.right.factors.size());
    if (x.size() != size_t(dl) * rk || y.size() != size_t(dr) * rk)
        throw error("ambient vector dimension mismatch");
    RationalModZ acc{0, 0};
    for (uint32_t i = 0; i < dl; ++i)
        for (uint32_t j = 0; j < dr; ++j) {
            const FracClass& c = theta.at(i, j);
            if (c.num.is_zero()) continue;
            std::vector<uint64_t> xi = block_component(x, i, rk);
            std::vector<uint64_t> yj = block_component(y, j, rk);
            if (all_zero(xi) || all_zero(yj)) continue;
            OmegaInverter Hinv(R, c.den);
            if (Hinv.singular)
                throw undetermined_at_precision(
                    "pole along the level ideal (denominator not coprime to omega_n at precision)");
            // the class of kappa/p^E is exact only while the junk p^{a-E}Z_p
            // stays integral relative to the denominator
            if (2 * Hinv.max_exp > ctx.a)
                throw undetermined_at_precision(
                    "specialization denominator exceeds half the precision");
            std::vector<uint64_t> t = R.mul(R.mul(xi, R.involute(yj)), R.reduce(c.num));
            std::vector<uint64_t> z = Hinv.apply_scaled(t);
            uint64_t kappa = R.identity_coefficient(z);
            acc = rational_add(acc, rational_mod_z(kappa % pow_u64(ctx.p, Hinv.max_exp),
                                                   Hinv.max_exp, ctx.p),
                               ctx.p);
        }
    return acc;
}

TorsionSpecialization specialize_torsion(const SesquiForm& theta, uint32_t n) {
    LevelQuotient lq = coinvariants_at_level(ModuleInput{theta.left}, n);
    LevelQuotient rq = coinvariants_at_level(ModuleInput{theta.right}, n);
    if (!lq.finite || !rq.finite)
        throw undetermined_at_precision(
            "coinvariants are infinite at precision; only the torsion part carries t_p");
    std::vector<RationalModZ> vals(size_t(lq.mod.rank()) * rq.mod.rank());
    for (uint32_t s = 0; s < lq.mod.rank(); ++s)
        for (uint32_t t = 0; t < rq.mod.rank(); ++t) {
            std::vector<uint64_t> xs(lq.ambient_dim), yt(rq.ambient_dim);
            for (uint32_t i = 0; i < lq.ambient_dim; ++i) xs[i] = lq.coords.embed.at(i, s);
            for (uint32_t i = 0; i < rq.ambient_dim; ++i) yt[i] = rq.coords.embed.at(i, t);
            vals[size_t(s) * rq.mod.rank() + t] = torsion_value_ambient(theta, n, xs, yt);
        }
    TorsionSpecialization out;
    out.form = make_finite_form(lq.mod, rq.mod, std::move(vals), /*galois=*/true,
                                /*alternating=*/false);
    out.left_coords = lq;
    out.right_coords = rq;
    return out;
}

// --- height specialization --------------------------------------------------------

bool qp_values_agree(const QpValue& x, const QpValue& y, uint32_t p) {
    uint32_t k = std::max(x.den_exp, y.den_exp);
    uint64_t nx = x.num * pow_u64(p, k - x.den_exp);
    uint64_t ny = y.num * pow_u64(p, k - y.den_exp);
    uint32_t prec = std::min(x.known_mod + (k - x.den_exp), y.known_mod + (k - y.den_exp));
    uint64_t q = pow_u64(p, prec);
    return nx % q == ny % q;
}

HeightForm specialize_height(const SesquiForm& theta, uint32_t n, const Series1& generator_unit) {
    const RingContext& ctx = theta.left.ctx;
    if (!modarith::val(generator_unit.coeff(0), ctx.p, ctx.a).is_unit())
        throw input_error("the level-ideal generator must be a unit multiple of omega_n");

    // free parts of the coinvariants from the two-precision split
    auto free_gens = [&](const ElementaryModule& E) {
        LevelQuotient q0 = coinvariants_at_level(ModuleInput{E}, n);
        LevelQuotient q1 = coinvariants_at_level(ModuleInput{E}, n, ctx.lifted());
        TorsionRankSplit split = zp_torsion_and_rank(q0.mod.orders, q1.mod.orders, ctx.a);
        if (!split.determined)
            throw undetermined_at_precision("free rank undetermined at precision");
        for (uint32_t t : split.torsion_orders)
            if (t >= ctx.a)
                throw undetermined_at_precision(
                    "torsion saturates the precision; free generators are ambiguous");
        std::vector<std::vector<uint64_t>> gens;
        for (uint32_t s = 0; s < split.free_rank; ++s) {
            std::vector<uint64_t> g(q0.ambient_dim);
            for (uint32_t i = 0; i < q0.ambient_dim; ++i) g[i] = q0.coords.embed.at(i, s);
            gens.push_back(std::move(g));
        }
        return gens;
    };
    auto lg = free_gens(theta.left);
    auto rg = free_gens(theta.right);

    HeightForm out;
    out.level = n;
    out.left_rank = uint32_t(lg.size());
    out.right_rank = uint32_t(rg.size());
    out.generator_note = "generator = (unit) * omega_" + std::to_string(n);
    if (lg.empty() || rg.empty()) return out;

    OmegaRing R(ctx, n);
    const uint32_t rk = R.rank();
    Series1 om = omega(ctx, n);
    OmegaInverter Cinv(R, generator_unit);
    if (Cinv.singular || Cinv.max_exp != 0)
        throw input_error("generator unit is not invertible in the level ring");
    std::vector<uint64_t> cinv = Cinv.apply_scaled(R.one());

    const uint32_t dl = uint32_t(theta.left.factors.size());
    const uint32_t dr = uint32_t(theta.right.factors.size());

    for (const auto& x : lg)
        for (const auto& y : rg) {
            // accumulate sum of kappa_i / p^{E_i} as one rational; each piece
            // is exact mod p^{a - E_i}, so the sum at common denominator K is
            // exact mod p^{min_i(a + K - 2 E_i)}
            uint64_t num = 0;
            uint32_t E = 0;
            uint32_t precision_budget = ctx.a;
            for (uint32_t i = 0; i < dl; ++i)
                for (uint32_t j = 0; j < dr; ++j) {
                    const FracClass& c = theta.at(i, j);
                    if (c.num.is_zero()) continue;
                    std::vector<uint64_t> xi = block_component(x, i, rk);
                    std::vector<uint64_t> yj = block_component(y, j, rk);
                    if (all_zero(xi) || all_zero(yj)) continue;

                    // residue of omega_n * theta along the level ideal: strip one
                    // omega factor from the denominator if present, else the
                    // contribution dies with omega_n * num = 0 in the level ring
                    WeierstrassData wd = weierstrass_prepare(c.den);
                    Series1 P_lift(ctx);
                    for (uint32_t t2 = 0; t2 < ctx.m; ++t2)
                        P_lift.set_coeff(t2, wd.distinguished.coeff(t2));
                    Series1 hprime = c.den;
                    Series1 numerator = c.num;
                    bool stripped = false;
                    if (wd.lambda >= rk) {
                        PolyDivision d = poly_divide_monic(P_lift, om, rk);
                        if (d.remainder.is_zero()) {
                            PolyDivision d2 = poly_divide_monic(d.quotient, om, rk);
                            if (d2.remainder.is_zero())
                                throw undetermined_at_precision(
                                    "pole of order >= 2 along the level ideal");
                            hprime = d.quotient.scaled(pow_u64(ctx.p, wd.mu) % ctx.pa);
                            stripped = true;
                        }
                    }
                    if (!stripped) numerator = numerator * om;  // reduces to zero mod omega_n

                    OmegaInverter Hinv(R, hprime);
                    if (Hinv.singular)
                        throw undetermined_at_precision(
                            "denominator residue not invertible at precision");
                    std::vector<uint64_t> t =
                        R.mul(R.mul(R.mul(xi, R.involute(yj)), R.reduce(numerator)), cinv);
                    std::vector<uint64_t> z = Hinv.apply_scaled(t);
                    uint64_t kappa = R.identity_coefficient(z);
                    if (2 * Hinv.max_exp > ctx.a)
                        throw undetermined_at_precision(
                            "height denominator exceeds half the precision");
                    // merge kappa / p^{Hinv.max_exp} into num / p^E
                    uint32_t k = std::max(E, Hinv.max_exp);
                    num = (num * pow_u64(ctx.p, k - E) % ctx.pa +
                           mul(kappa, pow_u64(ctx.p, k - Hinv.max_exp) % ctx.pa, ctx.pa)) %
                          ctx.pa;
                    E = k;
                    precision_budget = std::min(precision_budget, ctx.a - 2 * Hinv.max_exp);
                }
            QpValue val;
            val.num = num;
            val.den_exp = E;
            val.known_mod = std::min(ctx.a, precision_budget + E);
            // reduce: strip shared powers of p, fold zero-at-precision to zero
            uint64_t zero_mod = pow_u64(ctx.p, val.known_mod);
            if (val.num % zero_mod == 0) {
                val.num = 0;
                val.den_exp = 0;
                val.known_mod = precision_budget;
            } else {
                while (val.den_exp > 0 && val.num % ctx.p == 0) {
                    val.num /= ctx.p;
                    --val.den_exp;
                    --val.known_mod;
                }
                val.num %= pow_u64(ctx.p, val.known_mod);
            }
            out.values.push_back(val);
        }
    return out;
}

// --- nondegeneracy ------------------------------------------------------------

NondegeneracyReport nondegeneracy_finite(const FiniteForm& form) {
    const RingContext& ctx = form.left.ctx;
    NondegeneracyReport rep;
    const uint32_t r = form.left.rank(), c = form.right.rank();
    // phi: N -> dual(N'): row j of phi holds the j-th dual coordinate
    Mat phi(ctx, c, r);
    for (uint32_t i = 0; i < r; ++i)
        for (uint32_t j = 0; j < c; ++j) {
            const RationalModZ& v = form.at(i, j);
            phi.at(j, i) =
                v.den_exp == 0
                    ? 0
                    : mul(v.num, pow_u64(ctx.p, form.right.orders[j] - v.den_exp) % ctx.pa, ctx.pa);
        }
    Mat D = order_relations(ctx, form.right.orders);
    Mat ext(ctx, c, r + c);
    for (uint32_t i = 0; i < c; ++i) {
        for (uint32_t j = 0; j < r; ++j) ext.at(i, j) = phi.at(i, j);
        for (uint32_t j = 0; j < c; ++j) ext.at(i, r + j) = D.at(i, j);
    }
    Mat K = kernel_generators(ext);
    Mat W(ctx, r, K.cols());
    for (uint32_t i = 0; i < r; ++i)
        for (uint32_t j = 0; j < K.cols(); ++j) W.at(i, j) = K.at(i, j);
    SubgroupStructure ks = subgroup_structure(W, form.left.orders);
    rep.kernel_orders = ks.orders;
    if (!ks.orders.empty()) {
        std::vector<uint64_t> wit(r);
        for (uint32_t i = 0; i < r; ++i) wit[i] = ks.gens.at(i, 0);
        rep.kernel_witness = wit;
    }
    rep.cokernel_orders = quotient_structure(ctx, c, ext).orders;
    rep.nondegenerate = rep.kernel_orders.empty() && rep.cokernel_orders.empty();
    return rep;
}

namespace {

// Ambient projection matrix V_{n+1}^d -> V_n^d (reduce mod omega_n).
Mat ambient_projection(const RingContext& ctx, uint32_t n, uint32_t blocks) {
    OmegaRing Rn(ctx, n), Rn1(ctx, n + 1);
    Mat pr(ctx, blocks * Rn.rank(), blocks * Rn1.rank());
    for (uint32_t j = 0; j < Rn1.rank(); ++j) {
        Series1 tj(ctx);
        tj.set_coeff(j, 1);
        std::vector<uint64_t> red = Rn.reduce(tj);
        for (uint32_t b = 0; b < blocks; ++b)
            for (uint32_t i = 0; i < Rn.rank(); ++i)
                pr.at(b * Rn.rank() + i, b * Rn1.rank() + j) = red[i];
    }
    return pr;
}

// Exponent of ker(M^{omega_n} -> M/omega_n) computed through the level n+1
// model at the given precision.
uint32_t level_kernel_exponent(const ElementaryModule& E, uint32_t n, const RingContext& c) {
    LevelQuotient big = coinvariants_at_level(ModuleInput{E}, n + 1, c);
    LevelQuotient small = coinvariants_at_level(ModuleInput{E}, n, c);
    OmegaRing Rbig(c, n + 1);
    Series1 om = omega(c, n);
    const uint32_t blocks = uint32_t(E.factors.size());
    Mat om_block = Rbig.multiplication_matrix(om);
    Mat om_amb(c, big.ambient_dim, big.ambient_dim);
    for (uint32_t b = 0; b < blocks; ++b)
        for (uint32_t i = 0; i < Rbig.rank(); ++i)
            for (uint32_t j = 0; j < Rbig.rank(); ++j)
                om_amb.at(b * Rbig.rank() + i, b * Rbig.rank() + j) = om_block.at(i, j);
    Mat W = big.coords.project * om_amb * big.coords.embed;
    Mat D = order_relations(c, big.mod.orders);
    Mat ext(c, W.rows(), W.cols() + D.cols());
    for (uint32_t i = 0; i < W.rows(); ++i) {
        for (uint32_t j = 0; j < W.cols(); ++j) ext.at(i, j) = W.at(i, j);
        for (uint32_t j = 0; j < D.cols(); ++j) ext.at(i, W.cols() + j) = D.at(i, j);
    }
    Mat K = kernel_generators(ext);
    Mat Egen(c, big.mod.rank(), K.cols());
    for (uint32_t i = 0; i < big.mod.rank(); ++i)
        for (uint32_t j = 0; j < K.cols(); ++j) Egen.at(i, j) = K.at(i, j);
    SubgroupStructure tors = subgroup_structure(Egen, big.mod.orders);
    if (tors.orders.empty()) return 0;
    Mat proj = small.coords.project * ambient_projection(c, n, blocks) * big.coords.embed;
    Mat img = proj * tors.gens;
    Mat Dn = order_relations(c, small.mod.orders);
    Mat ext2(c, img.rows(), img.cols() + Dn.cols());
    for (uint32_t i = 0; i < img.rows(); ++i) {
        for (uint32_t j = 0; j < img.cols(); ++j) ext2.at(i, j) = img.at(i, j);
        for (uint32_t j = 0; j < Dn.cols(); ++j) ext2.at(i, img.cols() + j) = Dn.at(i, j);
    }
    Mat K2 = kernel_generators(ext2);
    Mat C2(c, tors.gens.cols(), K2.cols());
    for (uint32_t i = 0; i < tors.gens.cols(); ++i)
        for (uint32_t j = 0; j < K2.cols(); ++j) C2.at(i, j) = K2.at(i, j);
    Mat amb = tors.gens * C2;
    SubgroupStructure kk = subgroup_structure(amb, big.mod.orders);
    uint32_t e = 0;
    for (uint32_t x : kk.orders) e += x;
    return e;
}

}  // namespace

NondegeneracyReport nondegeneracy_test(const SesquiForm& theta, uint32_t n) {
    NondegeneracyReport rep;
    TorsionSpecialization spec;
    try {
        spec = specialize_torsion(theta, n);
    } catch (const undetermined_at_precision&) {
        rep.pole = true;
        return rep;
    }
    rep = nondegeneracy_finite(spec.form);

    const RingContext& ctx = theta.left.ctx;
    if (pow_u64(ctx.p, n + 1) < ctx.m) {
        try {
            uint32_t ea = level_kernel_exponent(theta.left, n, ctx);
            uint32_t eb = level_kernel_exponent(theta.left, n, ctx.lifted());
            rep.kernel_criterion_checked = true;
            rep.kernel_criterion_torsion = ea == eb;
        } catch (const error&) {
            rep.kernel_criterion_checked = false;
        }
    }
    return rep;
}

// --- axioms ---------------------------------------------------------------------

AxiomReport check_axioms(const SesquiForm& theta, const AxiomFlags& claimed) {
    AxiomReport rep;
    const uint32_t r = uint32_t(theta.left.factors.size());
    const uint32_t c = uint32_t(theta.right.factors.size());
    if (claimed.sesquilinear) {
        for (uint32_t i = 0; i < r; ++i)
            for (uint32_t j = 0; j < c; ++j) {
                const FracClass& e = theta.at(i, j);
                if (e.is_integral()) continue;
                if (!divides_at_precision(e.den, theta.left.factors[i] * e.num))
                    rep.fail("sesquilinear-left", i, j);
                if (!divides_at_precision(e.den, involution(theta.right.factors[j]) * e.num))
                    rep.fail("sesquilinear-right", i, j);
            }
    }
    if (claimed.symmetric || claimed.alternating) {
        if (r != c) {
            rep.fail("square shape required", 0, 0);
            return rep;
        }
        for (uint32_t i = 0; i < r; ++i)
            for (uint32_t j = 0; j < c; ++j) {
                FracClass swapped = frac_involute(theta.at(j, i));
                if (claimed.symmetric && !frac_equal(theta.at(i, j), swapped))
                    rep.fail("symmetric", i, j);
                if (claimed.alternating) {
                    if (i == j && !theta.at(i, i).is_integral())
                        rep.fail("alternating-diagonal", i, i);
                    if (i != j && !frac_add(theta.at(i, j), swapped).is_integral())
                        rep.fail("alternating-skew", i, j);
                }
            }
    }
    return rep;
}

AxiomReport check_axioms_finite(const FiniteForm& form, const AxiomFlags& claimed) {
    AxiomReport rep;
    const uint32_t p = form.left.ctx.p;
    const uint32_t r = form.left.rank(), c = form.right.rank();
    if (claimed.galois) {
        for (uint32_t i = 0; i < r; ++i)
            for (uint32_t j = 0; j < c; ++j) {
                RationalModZ v{0, 0};
                for (uint32_t k = 0; k < r; ++k)
                    for (uint32_t l = 0; l < c; ++l) {
                        RationalModZ t = rational_scale(form.at(k, l), form.left.action.at(k, i), p);
                        t = rational_scale(t, form.right.action.at(l, j), p);
                        v = rational_add(v, t, p);
                    }
                if (!rational_eq(v, form.at(i, j))) rep.fail("galois", i, j);
            }
    }
    if ((claimed.symmetric || claimed.alternating) && r != c) {
        rep.fail("square shape required", 0, 0);
        return rep;
    }
    if (claimed.symmetric) {
        for (uint32_t i = 0; i < r; ++i)
            for (uint32_t j = 0; j < c; ++j)
                if (!rational_eq(form.at(i, j), form.at(j, i))) rep.fail("symmetric", i, j);
    }
    if (claimed.alternating) {
        for (uint32_t i = 0; i < r; ++i)
            if (!form.at(i, i).is_zero()) rep.fail("alternating-diagonal", i, i);
        for (uint32_t i = 0; i < r; ++i)
            for (uint32_t j = i + 1; j < c; ++j)
                if (!rational_add(form.at(i, j), form.at(j, i), p).is_zero())
                    rep.fail("alternating-skew", i, j);
    }
    return rep;
}

AxiomReport check_swap_symmetry(const SesquiForm& theta, const SesquiForm& partner) {
    AxiomReport rep;
    const uint32_t r = uint32_t(theta.left.factors.size());
    const uint32_t c = uint32_t(theta.right.factors.size());
    if (partner.left.factors.size() != c || partner.right.factors.size() != r) {
        rep.fail("partner shape", 0, 0);
        return rep;
    }
    for (uint32_t i = 0; i < r; ++i)
        for (uint32_t j = 0; j < c; ++j)
            if (!frac_equal(partner.at(j, i), frac_involute(theta.at(i, j))))
                rep.fail("swap-symmetry", i, j);
    return rep;
}

// --- alternating square order -----------------------------------------------------

SquareOrderResult alternating_square_order(const FiniteForm& form) {
    SquareOrderResult res;
    const RingContext& ctx = form.left.ctx;
    const uint32_t p = ctx.p;
    if (form.left.orders != form.right.orders) {
        res.refused = true;
        res.reason = "form is not defined on a single module";
        return res;
    }
    AxiomFlags flags;
    flags.alternating = true;
    if (!check_axioms_finite(form, flags).all_pass) {
        res.refused = true;
        res.reason = "form is not alternating";
        return res;
    }
    NondegeneracyReport nd = nondegeneracy_finite(form);
    if (!nd.nondegenerate) {
        res.refused = true;
        res.reason = "form is degenerate";
        res.kernel_witness = nd.kernel_witness;
        return res;
    }

    const uint32_t r = form.left.rank();
    std::vector<std::vector<uint64_t>> gens;
    std::vector<uint32_t> gen_orders = form.left.orders;
    for (uint32_t i = 0; i < r; ++i) {
        std::vector<uint64_t> e(r, 0);
        e[i] = 1;
        gens.push_back(e);
    }
    std::vector<std::pair<std::vector<uint64_t>, std::vector<uint64_t>>> pairs;
    std::vector<uint32_t> pair_orders;

    auto value = [&](const std::vector<uint64_t>& x, const std::vector<uint64_t>& y) {
        return finite_form_value(form, x, y);
    };

    while (!gens.empty()) {
        uint32_t target = *std::max_element(gen_orders.begin(), gen_orders.end());
        int32_t bs = -1, bt = -1;
        for (uint32_t s = 0; s < gens.size() && bs < 0; ++s)
            for (uint32_t t = 0; t < gens.size(); ++t) {
                if (s == t) continue;
                if (value(gens[s], gens[t]).den_exp == target) {
                    bs = int32_t(s);
                    bt = int32_t(t);
                    break;
                }
            }
        if (bs < 0) {
            res.refused = true;
            res.reason = "no hyperbolic pair of maximal order (residual degeneracy)";
            return res;
        }
        std::vector<uint64_t> x = gens[uint32_t(bs)];
        std::vector<uint64_t> y = gens[uint32_t(bt)];
        uint32_t c = target;
        uint64_t pc = pow_u64(p, c);
        RationalModZ v = value(x, y);
        uint64_t winv = inv(v.num, pc);
        for (auto& yi : y) yi = mul(yi, winv, ctx.pa);

        std::vector<std::vector<uint64_t>> reduced;
        for (uint32_t g = 0; g < gens.size(); ++g) {
            if (int32_t(g) == bs || int32_t(g) == bt) continue;
            RationalModZ a1 = value(gens[g], y);
            RationalModZ a2 = value(gens[g], x);
            uint64_t A = a1.num * pow_u64(p, c - a1.den_exp) % pc;
            uint64_t B = neg(a2.num * pow_u64(p, c - a2.den_exp) % pc, pc);
            std::vector<uint64_t> z = gens[g];
            for (uint32_t i = 0; i < r; ++i) {
                uint64_t corr = add(mul(A, x[i], ctx.pa), mul(B, y[i], ctx.pa), ctx.pa);
                z[i] = sub(z[i], corr, ctx.pa);
            }
            reduced.push_back(std::move(z));
        }
        gens.clear();
        gen_orders.clear();
        if (!reduced.empty()) {
            Mat W(ctx, r, uint32_t(reduced.size()));
            for (uint32_t i = 0; i < r; ++i)
                for (uint32_t j = 0; j < reduced.size(); ++j) W.at(i, j) = reduced[j][i];
            SubgroupStructure s = subgroup_structure(W, form.left.orders);
            for (uint32_t j = 0; j < s.orders.size(); ++j) {
                std::vector<uint64_t> g(r);
                for (uint32_t i = 0; i < r; ++i) g[i] = s.gens.at(i, j);
                gens.push_back(std::move(g));
                gen_orders.push_back(s.orders[j]);
            }
        }
        pairs.push_back({std::move(x), std::move(y)});
        pair_orders.push_back(c);
    }

    res.witness_orders = pair_orders;
    uint32_t half = 0;
    for (uint32_t c : pair_orders) half += c;
    res.even_exponent = 2 * half == form.left.order_exponent();

    res.witness_checked = res.even_exponent;
    for (uint32_t i = 0; i < pairs.size() && res.witness_checked; ++i) {
        RationalModZ v = value(pairs[i].first, pairs[i].second);
        if (v.den_exp != pair_orders[i] || v.num != 1) res.witness_checked = false;
        for (uint32_t j = i + 1; j < pairs.size() && res.witness_checked; ++j) {
            if (!value(pairs[i].first, pairs[j].first).is_zero() ||
                !value(pairs[i].first, pairs[j].second).is_zero() ||
                !value(pairs[i].second, pairs[j].first).is_zero() ||
                !value(pairs[i].second, pairs[j].second).is_zero())
                res.witness_checked = false;
        }
    }
    return res;
}

// --- functional equation -----------------------------------------------------------

FunceqResult functional_equation_check(const Series1& f) {
    if (f.is_zero()) throw indeterminate_at_precision("zero series has no functional equation");
    WeierstrassData wf = weierstrass_prepare(f);
    WeierstrassData wg = weierstrass_prepare(involution(f));
    FunceqResult res;
    res.holds = wf.mu == wg.mu && wf.distinguished == wg.distinguished;
    if (!res.holds) return res;
    uint64_t pa = wf.reduced_ctx.pa;
    uint64_t ratio = mul(wg.unit.coeff(0), inv(wf.unit.coeff(0), pa), pa);
    if (ratio == 1 % pa)
        res.epsilon = 1;
    else if (ratio == pa - 1)
        res.epsilon = -1;
    return res;
}

namespace {

bool row_is_unit(const Series1& s) {
    return modarith::val(s.coeff(0), s.context().p, s.context().a).is_unit();
}

std::vector<Series1> rows_mul(const std::vector<Series1>& x, const std::vector<Series1>& y,
                              const RingContext& c1) {
    std::vector<Series1> r(x.size(), Series1(c1));
    for (uint32_t i = 0; i < x.size(); ++i) {
        if (x[i].is_zero()) continue;
        for (uint32_t j = 0; i + j < y.size(); ++j) {
            if (y[j].is_zero()) continue;
            r[i + j] = r[i + j] + x[i] * y[j];
        }
    }
    return r;
}

std::vector<Series1> rows_inverse(const std::vector<Series1>& v, const RingContext& c1) {
    std::vector<Series1> w(v.size(), Series1(c1));
    Series1 v0inv = v[0].inverse();
    w[0] = v0inv;
    for (uint32_t k = 1; k < v.size(); ++k) {
        Series1 s(c1);
        for (uint32_t i = 1; i <= k; ++i) s = s + v[i] * w[k - i];
        w[k] = s.negated() * v0inv;
    }
    return w;
}

struct Div2Result {
    bool decidable = false;
    bool divisible = false;
    uint64_t q00 = 0;
};

// T1^c1 T2^c2 content of a two-variable series (orders of vanishing along the
// coordinate axes at truncation).
std::pair<uint32_t, uint32_t> variable_content(const Series2& f) {
    const RingContext& c = f.context();
    uint32_t c1 = c.m, c2 = c.m;
    for (uint32_t i = 0; i < c.m; ++i)
        for (uint32_t j = 0; j < c.m; ++j)
            if (f.coeff(i, j) != 0) {
                c1 = std::min(c1, i);
                c2 = std::min(c2, j);
            }
    return {c1, c2};
}

Series2 strip_content(const Series2& f, uint32_t c1, uint32_t c2) {
    Series2 r(f.context());
    const uint32_t m = f.context().m;
    for (uint32_t i = c1; i < m; ++i)
        for (uint32_t j = c2; j < m; ++j) r.set_coeff(i - c1, j - c2, f.coeff(i, j));
    return r;
}

// Directional (T1) Weierstrass division in Z/p^a [[T1, T2]] at precision.
Div2Result divide2_stripped(const Series2& h, const Series2& f) {
    const RingContext& c2 = f.context();
    RingContext c1 = RingContext::make(c2.p, c2.a, c2.m, 1);
    std::vector<Series1> H, F;
    for (uint32_t i = 0; i < c2.m; ++i) {
        H.push_back(h.row(i));
        F.push_back(f.row(i));
    }
    uint32_t mu = c1.a;
    for (const Series1& row : F) {
        Valuation v = row.content_valuation();
        if (!v.saturated) mu = std::min(mu, v.value);
    }
    if (mu >= c1.a) throw indeterminate_at_precision("series vanishes at precision");
    RingContext rc = mu > 0 ? RingContext::make(c1.p, c1.a - mu, c1.m, 1) : c1;
    auto strip = [&](const std::vector<Series1>& rows, bool required,
                     std::vector<Series1>& out) -> bool {
        out.clear();
        for (const Series1& row : rows) {
            Series1 s(rc);
            for (uint32_t i = 0; i < rc.m; ++i) {
                uint64_t co = row.coeff(i);
                Valuation v = modarith::val(co, c1.p, c1.a);
                if (v.saturated) continue;
                if (v.value < mu) {
                    if (required) return false;
                    continue;
                }
                s.set_coeff(i, div_pow_p(co, c1.p, mu) % rc.pa);
            }
            out.push_back(std::move(s));
        }
        return true;
    };
    std::vector<Series1> Fs, Hs;
    strip(F, false, Fs);
    Div2Result res;
    if (!strip(H, true, Hs)) {
        res.decidable = true;
        res.divisible = false;
        return res;
    }
    std::optional<uint32_t> lambda;
    for (uint32_t i = 0; i < Fs.size(); ++i)
        if (row_is_unit(Fs[i])) {
            lambda = i;
            break;
        }
    if (!lambda) return res;  // no directional handle: undecidable this way

    const uint32_t m = uint32_t(Hs.size());
    if (*lambda == 0) {
        std::vector<Series1> W = rows_inverse(Fs, rc);
        std::vector<Series1> q = rows_mul(Hs, W, rc);
        res.decidable = true;
        res.divisible = true;
        res.q00 = q[0].coeff(0);
        return res;
    }
    std::vector<Series1> V(Fs.begin() + *lambda, Fs.end());
    V.resize(m, Series1(rc));
    std::vector<Series1> A(Fs.begin(), Fs.begin() + *lambda);
    A.resize(m, Series1(rc));
    std::vector<Series1> W = rows_inverse(V, rc);
    std::vector<Series1> q(m, Series1(rc));
    std::vector<Series1> r = Hs;
    for (uint32_t iter = 0; iter <= rc.a + rc.m + 1; ++iter) {
        std::vector<Series1> high(m, Series1(rc)), low(m, Series1(rc));
        bool high_zero = true;
        for (uint32_t i = 0; i < m; ++i) {
            if (i < *lambda)
                low[i] = r[i];
            else {
                high[i - *lambda] = r[i];
                if (!r[i].is_zero()) high_zero = false;
            }
        }
        if (high_zero) {
            res.decidable = true;
            res.divisible =
                std::all_of(r.begin(), r.begin() + *lambda,
                            [](const Series1& s) { return s.is_zero(); });
            res.q00 = q[0].coeff(0);
            return res;
        }
        std::vector<Series1> step = rows_mul(high, W, rc);
        for (uint32_t i = 0; i < m; ++i) q[i] = q[i] + step[i];
        std::vector<Series1> corr = rows_mul(step, A, rc);
        for (uint32_t i = 0; i < m; ++i) r[i] = low[i] - corr[i];
    }
    return res;  // did not stabilize: undecidable
}

// Strip shared powers of the variables first (T1^c T2^c' factors have no
// directional unit), then divide.
Div2Result divide2(const Series2& h, const Series2& f) {
    auto [f1, f2] = variable_content(f);
    if (f1 == 0 && f2 == 0) return divide2_stripped(h, f);
    auto [h1, h2] = variable_content(h);
    if (h1 < f1 || h2 < f2) {
        Div2Result res;
        res.decidable = true;
        res.divisible = false;
        return res;
    }
    return divide2_stripped(strip_content(h, f1, f2), strip_content(f, f1, f2));
}

Series2 transpose_grid(const Series2& f) {
    Series2 r(f.context());
    for (uint32_t i = 0; i < f.context().m; ++i)
        for (uint32_t j = 0; j < f.context().m; ++j) r.set_coeff(j, i, f.coeff(i, j));
    return r;
}

}  // namespace

FunceqResult functional_equation_check(const Series2& f) {
    if (f.is_zero()) throw indeterminate_at_precision("zero series has no functional equation");
    Series2 g = involution(f);
    Div2Result fwd = divide2(g, f);
    Div2Result bwd = divide2(f, g);
    if (!fwd.decidable || !bwd.decidable) {
        Series2 ft = transpose_grid(f), gt = transpose_grid(g);
        fwd = divide2(gt, ft);
        bwd = divide2(ft, gt);
        if (!fwd.decidable || !bwd.decidable)
            throw undetermined_at_precision("associateness undetermined at precision");
    }
    FunceqResult res;
    res.holds = fwd.divisible && bwd.divisible;
    if (!res.holds) return res;
    const uint32_t p = f.context().p;
    if (fwd.q00 % p == 1 % p)
        res.epsilon = 1;
    else if ((fwd.q00 + 1) % p == 0)
        res.epsilon = -1;
    return res;
}

}  // namespace iwa
