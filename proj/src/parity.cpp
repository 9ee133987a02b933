#include "iwa/parity.hpp"

#include <algorithm>

namespace iwa {

using modarith::add;
using modarith::div_pow_p;
using modarith::inv;
using modarith::mul;
using modarith::neg;
using modarith::pow_u64;
using modarith::sub;

ProjectiveSystem make_projective_system(RingContext ctx, std::vector<FiniteModule> levels,
                                        std::vector<Mat> transitions) {
    if (levels.empty()) throw input_error("a projective system needs at least one level");
    if (transitions.size() + 1 != levels.size())
        throw input_error("a system with L levels needs L-1 transitions");
    for (uint32_t k = 0; k < transitions.size(); ++k) {
        const Mat& t = transitions[k];
        if (t.rows() != levels[k].rank() || t.cols() != levels[k + 1].rank())
            throw input_error("transition " + std::to_string(k) + " has wrong shape");
        if (!map_well_defined(t, levels[k + 1].orders, levels[k].orders))
            throw input_error("transition " + std::to_string(k) + " is not well defined");
    }
    return ProjectiveSystem{ctx, std::move(levels), std::move(transitions)};
}

bool transition_surjective(const ProjectiveSystem& sys, uint32_t k) {
    const FiniteModule& target = sys.levels[k];
    if (target.is_zero()) return true;
    SubgroupStructure img = subgroup_structure(sys.transitions[k], target.orders);
    uint32_t e = 0;
    for (uint32_t x : img.orders) e += x;
    return e == target.order_exponent();
}

std::vector<uint32_t> divisor_profile(const ProjectiveSystem& sys, uint32_t n) {
    if (n >= sys.levels.size()) throw input_error("level out of range");
    size_t d = 0;
    for (const FiniteModule& lvl : sys.levels) d = std::max(d, lvl.orders.size());
    std::vector<uint32_t> prof = sys.levels[n].orders;
    prof.resize(d, 0);
    return prof;
}

RankEstimate guo_rank(const ProjectiveSystem& sys, uint32_t horizon) {
    if (horizon >= sys.levels.size())
        throw input_error("horizon exceeds the available levels");
    for (uint32_t k = 0; k < horizon; ++k)
        if (!transition_surjective(sys, k))
            throw input_error("transition " + std::to_string(k) +
                              " is not surjective; Guo's lemma does not apply");
    RankEstimate est;
    est.horizon = horizon;
    std::vector<uint32_t> top = divisor_profile(sys, horizon);
    std::vector<uint32_t> prev = divisor_profile(sys, horizon > 0 ? horizon - 1 : 0);
    est.d = uint32_t(top.size());
    const uint32_t threshold = sys.ctx.a / 2;
    for (uint32_t j = 0; j < top.size(); ++j)
        if (horizon > 0 && top[j] > prev[j] && top[j] > threshold) ++est.unbounded_count;
    est.confidence = "exact within horizon " + std::to_string(horizon) + " at precision " +
                     std::to_string(sys.ctx.a);
    return est;
}

namespace {

// Quotient of a level module by the kernel of its form; returns the profile.
struct QuotientedLevel {
    std::vector<uint32_t> profile;
    uint32_t kernel_exponent = 0;
    uint32_t kernel_max_order = 0;
};

QuotientedLevel quotient_by_kernel(const FiniteModule& N, const FiniteForm& form) {
    const RingContext& ctx = N.ctx;
    QuotientedLevel out;
    NondegeneracyReport nd = nondegeneracy_finite(form);
    for (uint32_t e : nd.kernel_orders) {
        out.kernel_exponent += e;
        out.kernel_max_order = std::max(out.kernel_max_order, e);
    }
    if (nd.kernel_orders.empty()) {
        out.profile = N.orders;
        return out;
    }
    // rebuild the kernel generators to quotient by them
    const uint32_t r = N.rank(), c = form.right.rank();
    Mat phi(ctx, c, r);
    for (uint32_t i = 0; i < r; ++i)
        for (uint32_t j = 0; j < c; ++j) {
            const RationalModZ& v = form.at(i, j);
            phi.at(j, i) = v.den_exp == 0
                               ? 0
                               : mul(v.num,
                                     pow_u64(ctx.p, form.right.orders[j] - v.den_exp) % ctx.pa,
                                     ctx.pa);
        }
    Mat D = order_relations(ctx, form.right.orders);
    Mat ext(ctx, c, r + c);
    for (uint32_t i = 0; i < c; ++i) {
        for (uint32_t j = 0; j < r; ++j) ext.at(i, j) = phi.at(i, j);
        for (uint32_t j = 0; j < c; ++j) ext.at(i, r + j) = D.at(i, j);
    }
    Mat K = kernel_generators(ext);
    Mat Dn = order_relations(ctx, N.orders);
    Mat W(ctx, r, K.cols() + r);
    for (uint32_t i = 0; i < r; ++i) {
        for (uint32_t j = 0; j < K.cols(); ++j) W.at(i, j) = K.at(i, j);
        for (uint32_t j = 0; j < r; ++j) W.at(i, K.cols() + j) = Dn.at(i, j);
    }
    out.profile = quotient_structure(ctx, r, W).orders;
    return out;
}

}  // namespace

ParityReport parity_check(const ProjectiveSystem& sys, const std::vector<FiniteForm>& forms,
                          uint32_t kernel_bound, uint32_t horizon) {
    ParityReport rep;
    if (forms.size() != sys.levels.size()) {
        rep.failure = "one alternating form per level is required";
        return rep;
    }
    if (horizon >= sys.levels.size()) {
        rep.failure = "horizon exceeds the available levels";
        return rep;
    }
    for (uint32_t k = 0; k < horizon; ++k)
        if (!transition_surjective(sys, k)) {
            rep.failure = "transition " + std::to_string(k) + " is not surjective";
            return rep;
        }
    AxiomFlags flags;
    flags.alternating = true;
    size_t d = 0;
    std::vector<std::vector<uint32_t>> profiles;
    for (uint32_t n = 0; n <= horizon; ++n) {
        const FiniteForm& f = forms[n];
        if (f.left.orders != sys.levels[n].orders || f.right.orders != sys.levels[n].orders) {
            rep.failure = "form at level " + std::to_string(n) + " does not match the level module";
            return rep;
        }
        if (!check_axioms_finite(f, flags).all_pass) {
            rep.failure = "form at level " + std::to_string(n) + " is not alternating";
            return rep;
        }
        QuotientedLevel q = quotient_by_kernel(sys.levels[n], f);
        if (q.kernel_max_order > kernel_bound) {
            rep.failure = "form kernel at level " + std::to_string(n) +
                          " exceeds the declared p-power bound (quasi-nondegeneracy fails)";
            return rep;
        }
        d = std::max(d, q.profile.size());
        profiles.push_back(q.profile);
    }
    for (auto& prof : profiles) prof.resize(d, 0);
    if (d % 2 != 0) {
        // a trailing zero column keeps the pairing readable
        for (auto& prof : profiles) prof.push_back(0);
        d += 1;
    }
    for (uint32_t n = 0; n <= horizon; ++n)
        for (uint32_t j = 0; 2 * j + 1 < d; ++j)
            if (profiles[n][2 * j] != profiles[n][2 * j + 1]) {
                rep.failure = "profile entries r_" + std::to_string(2 * j + 1) + ", r_" +
                              std::to_string(2 * j + 2) + " differ at level " + std::to_string(n);
                rep.paired_profiles = profiles;
                return rep;
            }
    // unbounded pairs by the same criterion as guo_rank, on the quotients
    const uint32_t threshold = sys.ctx.a / 2;
    uint32_t pairs = 0;
    for (uint32_t j = 0; 2 * j + 1 < d; ++j) {
        uint32_t top = profiles[horizon][2 * j];
        uint32_t prev = horizon > 0 ? profiles[horizon - 1][2 * j] : top;
        if (horizon > 0 && top > prev && top > threshold) ++pairs;
    }
    rep.pass = true;
    rep.even_rank = 2 * pairs;
    rep.paired_profiles = profiles;
    return rep;
}

// --- two-variable lambda congruence ----------------------------------------------

namespace {

// Multiplication matrix of F on (Z/p^a)[[T2]][T1]/(omega_n(T1)): a p^n x p^n
// matrix with Series1 (T2) entries.
std::vector<Series1> lambda_matrix(const ElementaryModule2& M, uint32_t n, uint32_t factor,
                                   const RingContext& c1, uint32_t& rank_out) {
    const RingContext& c2 = M.ctx;
    uint32_t rk = uint32_t(pow_u64(c2.p, n));
    if (rk >= c2.m) throw truncation_too_short("lambda level needs m > p^n");
    rank_out = rk;
    // reduce F mod omega_n(T1): rows = T1-coefficients as T2-series
    Series1 om = omega(c1, n);
    std::vector<Series1> rows;
    for (uint32_t i = 0; i < c2.m; ++i) rows.push_back(M.factors[factor].row(i));
    // polynomial division in T1 by monic omega_n
    for (int32_t i = int32_t(c2.m) - 1; i >= int32_t(rk); --i) {
        Series1 lead = rows[uint32_t(i)];
        if (lead.is_zero()) continue;
        uint32_t shift = uint32_t(i) - rk;
        for (uint32_t j = 0; j <= rk; ++j) {
            if (om.coeff(j) == 0) continue;
            rows[shift + j] = rows[shift + j] - lead.scaled(om.coeff(j));
        }
        rows[uint32_t(i)] = Series1(c1);
    }
    rows.resize(rk);
    // columns: T1^j * Fbar mod omega_n
    std::vector<Series1> mat(size_t(rk) * rk, Series1(c1));
    std::vector<Series1> col = rows;
    for (uint32_t j = 0; j < rk; ++j) {
        for (uint32_t i = 0; i < rk; ++i) mat[size_t(i) * rk + j] = col[i];
        if (j + 1 == rk) break;
        // multiply by T1: shift and reduce the top coefficient by omega_n
        Series1 top = col[rk - 1];
        for (int32_t i = int32_t(rk) - 1; i > 0; --i) col[uint32_t(i)] = col[uint32_t(i) - 1];
        col[0] = Series1(c1);
        if (!top.is_zero())
            for (uint32_t t = 0; t < rk; ++t) col[t] = col[t] - top.scaled(om.coeff(t));
    }
    return mat;
}

}  // namespace

LocalCorank lambda_level_rank(const ElementaryModule2& M, uint32_t n) {
    const RingContext& c2 = M.ctx;
    RingContext c1 = RingContext::make(c2.p, c2.a, c2.m, 1);
    LocalCorank out;
    // block-diagonal over the factors; coranks add
    for (uint32_t f = 0; f < M.factors.size(); ++f) {
        uint32_t rk = 0;
        std::vector<Series1> mat = lambda_matrix(M, n, f, c1, rk);
        std::vector<uint32_t> row_scale(rk, 0);  // accumulated pivot valuation per row
        std::vector<bool> row_done(rk, false), col_done(rk, false);
        uint32_t pivots = 0;
        auto entry = [&](uint32_t i, uint32_t j) -> Series1& { return mat[size_t(i) * rk + j]; };
        while (true) {
            // pivot: entry whose T2-constant term is nonzero, minimal valuation
            int32_t bi = -1, bj = -1;
            uint32_t best = c1.a + 1;
            for (uint32_t i = 0; i < rk; ++i) {
                if (row_done[i]) continue;
                for (uint32_t j = 0; j < rk; ++j) {
                    if (col_done[j]) continue;
                    Valuation v = modarith::val(entry(i, j).coeff(0), c1.p, c1.a);
                    if (v.saturated) continue;
                    // valuation relative to the row scale
                    if (v.value < row_scale[i]) continue;  // cannot happen for exact data
                    uint32_t rel = v.value - row_scale[i];
                    if (rel < best) {
                        best = rel;
                        bi = int32_t(i);
                        bj = int32_t(j);
                    }
                }
            }
            if (bi < 0) break;
            ++pivots;
            row_done[uint32_t(bi)] = true;
            col_done[uint32_t(bj)] = true;
            const Series1 piv = entry(uint32_t(bi), uint32_t(bj));
            for (uint32_t i = 0; i < rk; ++i) {
                if (row_done[i]) continue;
                Series1& e = entry(i, uint32_t(bj));
                if (e.is_zero()) continue;
                // row_i <- piv * row_i - e * row_bi  (clears column bj)
                Series1 ecopy = e;
                for (uint32_t j = 0; j < rk; ++j) {
                    if (col_done[j] && j != uint32_t(bj)) continue;
                    entry(i, j) = piv * entry(i, j) - ecopy * entry(uint32_t(bi), j);
                }
                row_scale[i] += best + row_scale[uint32_t(bi)];
            }
        }
        out.corank += rk - pivots;
        for (uint32_t i = 0; i < rk; ++i) {
            if (row_done[i]) continue;
            out.precision_erosion = std::max(out.precision_erosion, row_scale[i]);
            // a row declared zero while its scale ate most of the precision is
            // not a trustworthy verdict
            if (row_scale[i] + 2 > c1.a) out.determined = false;
        }
    }
    return out;
}

LambdaCongruenceReport lambda_congruence_check(const ElementaryModule2& M, uint32_t n_lo,
                                               uint32_t n_hi) {
    LambdaCongruenceReport rep;
    const uint32_t p = M.ctx.p;
    for (uint32_t n = n_lo; n <= n_hi; ++n) {
        LocalCorank lc = lambda_level_rank(M, n);
        rep.lambdas.push_back(lc.corank);
        rep.determined.push_back(lc.determined);
    }
    rep.all_determined =
        std::all_of(rep.determined.begin(), rep.determined.end(), [](bool b) { return b; });
    rep.congruence_holds = true;
    for (uint32_t l : rep.lambdas)
        if (l % (p - 1) != rep.lambdas.front() % (p - 1)) rep.congruence_holds = false;
    return rep;
}

}  // namespace iwa
