#include "iwa/modules.hpp"

#include <algorithm>
#include <numeric>

namespace iwa {

using modarith::add;
using modarith::div_pow_p;
using modarith::mul;
using modarith::neg;
using modarith::pow_u64;
using modarith::sub;

uint32_t FiniteModule::order_exponent() const {
    return std::accumulate(orders.begin(), orders.end(), uint32_t(0));
}

bool map_well_defined(const Mat& h, const std::vector<uint32_t>& src,
                      const std::vector<uint32_t>& dst) {
    const RingContext& ctx = h.context();
    if (h.rows() != dst.size() || h.cols() != src.size()) return false;
    for (uint32_t i = 0; i < h.rows(); ++i)
        for (uint32_t j = 0; j < h.cols(); ++j) {
            if (dst[i] <= src[j]) continue;
            uint64_t r = h.at(i, j) % pow_u64(ctx.p, dst[i]);
            if (r % pow_u64(ctx.p, dst[i] - src[j]) != 0) return false;
        }
    return true;
}

bool maps_equal_mod_orders(const Mat& x, const Mat& y, const std::vector<uint32_t>& row_orders) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
    const RingContext& ctx = x.context();
    for (uint32_t i = 0; i < x.rows(); ++i) {
        uint64_t q = pow_u64(ctx.p, std::min(row_orders[i], ctx.a));
        for (uint32_t j = 0; j < x.cols(); ++j)
            if (x.at(i, j) % q != y.at(i, j) % q) return false;
    }
    return true;
}

FiniteModule make_finite_module(RingContext ctx, uint32_t level,
                                std::vector<uint32_t> orders, Mat action) {
    for (size_t i = 0; i + 1 < orders.size(); ++i)
        if (orders[i] < orders[i + 1]) throw input_error("orders must be non-increasing");
    for (uint32_t e : orders)
        if (e == 0 || e > ctx.a) throw input_error("cyclic orders must lie in [1, a]");
    if (action.rows() != orders.size() || action.cols() != orders.size())
        throw input_error("action matrix has wrong shape");
    if (!orders.empty()) {
        if (!invertible_mod_p(action)) throw input_error("gamma action must be invertible");
        if (!map_well_defined(action, orders, orders))
            throw input_error("action is not well defined on the cyclic decomposition");
        Mat pw = action.pow(pow_u64(ctx.p, level));
        if (!maps_equal_mod_orders(pw, Mat::identity(ctx, uint32_t(orders.size())), orders))
            throw input_error("gamma^{p^level} does not act as the identity");
    }
    return FiniteModule{ctx, level, std::move(orders), std::move(action)};
}

FiniteModule zero_finite_module(RingContext ctx, uint32_t level) {
    return FiniteModule{ctx, level, {}, Mat(ctx, 0, 0)};
}

FiniteModule direct_sum(const FiniteModule& x, const FiniteModule& y) {
    require_same_context(x.ctx, y.ctx, "direct_sum");
    uint32_t level = std::max(x.level, y.level);
    std::vector<uint32_t> orders;
    Mat act(x.ctx, x.rank() + y.rank(), x.rank() + y.rank());
    // interleave to keep orders descending: place x first, then y, then sort
    std::vector<std::pair<uint32_t, std::pair<bool, uint32_t>>> tagged;
    for (uint32_t i = 0; i < x.rank(); ++i) tagged.push_back({x.orders[i], {false, i}});
    for (uint32_t i = 0; i < y.rank(); ++i) tagged.push_back({y.orders[i], {true, i}});
    std::stable_sort(tagged.begin(), tagged.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (uint32_t i = 0; i < tagged.size(); ++i) {
        orders.push_back(tagged[i].first);
        for (uint32_t j = 0; j < tagged.size(); ++j) {
            if (tagged[i].second.first != tagged[j].second.first) continue;
            const Mat& src = tagged[i].second.first ? y.action : x.action;
            act.at(i, j) = src.at(tagged[i].second.second, tagged[j].second.second);
        }
    }
    return make_finite_module(x.ctx, level, std::move(orders), std::move(act));
}

namespace {

Mat hconcat(const Mat& A, const Mat& B) {
    Mat r(A.context(), A.rows(), A.cols() + B.cols());
    for (uint32_t i = 0; i < A.rows(); ++i) {
        for (uint32_t j = 0; j < A.cols(); ++j) r.at(i, j) = A.at(i, j);
        for (uint32_t j = 0; j < B.cols(); ++j) r.at(i, A.cols() + j) = B.at(i, j);
    }
    return r;
}

// Induced endomorphism on a quotient given by QuotientStructure coordinates.
Mat induced_on_quotient(const Mat& endo, const QuotientStructure& q) {
    return q.project * endo * q.embed;
}

FiniteModule module_from_quotient(const RingContext& ctx, uint32_t level,
                                  const QuotientStructure& q, const Mat& gamma_ambient) {
    Mat act = induced_on_quotient(gamma_ambient, q);
    return make_finite_module(ctx, level, q.orders, std::move(act));
}

}  // namespace

FiniteModule coinvariants(const FiniteModule& N, uint32_t m) {
    const RingContext& ctx = N.ctx;
    if (N.is_zero()) return zero_finite_module(ctx, m);
    Mat phi = N.action.pow(pow_u64(ctx.p, m)) - Mat::identity(ctx, N.rank());
    Mat rel = hconcat(phi, order_relations(ctx, N.orders));
    QuotientStructure q = quotient_structure(ctx, N.rank(), rel);
    return module_from_quotient(ctx, std::min(m, N.level), q, N.action);
}

SubmoduleWithEmbedding invariants_with_embedding(const FiniteModule& N, uint32_t m) {
    const RingContext& ctx = N.ctx;
    if (N.is_zero()) return {zero_finite_module(ctx, m), Mat(ctx, 0, 0)};
    Mat phi = N.action.pow(pow_u64(ctx.p, m)) - Mat::identity(ctx, N.rank());
    Mat D = order_relations(ctx, N.orders);
    Mat K = kernel_generators(hconcat(phi, D));
    // x-parts of the kernel generate the invariants inside N
    Mat W(ctx, N.rank(), K.cols());
    for (uint32_t i = 0; i < N.rank(); ++i)
        for (uint32_t j = 0; j < K.cols(); ++j) W.at(i, j) = K.at(i, j);
    SubgroupStructure s = subgroup_structure(W, N.orders);
    if (s.orders.empty()) return {zero_finite_module(ctx, std::min(m, N.level)), Mat(ctx, N.rank(), 0)};
    // action in the subgroup coordinates
    Mat act(ctx, uint32_t(s.orders.size()), uint32_t(s.orders.size()));
    for (uint32_t j = 0; j < s.orders.size(); ++j) {
        std::vector<uint64_t> g(N.rank());
        for (uint32_t i = 0; i < N.rank(); ++i) g[i] = s.gens.at(i, j);
        auto img = N.action.apply(g);
        auto c = express(s.gens, N.orders, img);
        if (!c) throw error("internal: invariants are not action-stable");
        for (uint32_t i = 0; i < s.orders.size(); ++i) act.at(i, j) = (*c)[i];
    }
    FiniteModule sub = make_finite_module(ctx, std::min(m, N.level), s.orders, std::move(act));
    return {std::move(sub), s.gens};
}

FiniteModule invariants(const FiniteModule& N, uint32_t m) {
    return invariants_with_embedding(N, m).sub;
}

FiniteModule pontryagin_dual(const FiniteModule& N) {
    const RingContext& ctx = N.ctx;
    if (N.is_zero()) return N;
    Mat ginv = inverse(N.action);
    Mat act(ctx, N.rank(), N.rank());
    for (uint32_t k = 0; k < N.rank(); ++k)
        for (uint32_t j = 0; j < N.rank(); ++j) {
            uint64_t v = ginv.at(j, k);
            if (N.orders[k] >= N.orders[j]) {
                act.at(k, j) = mul(v, pow_u64(ctx.p, N.orders[k] - N.orders[j]) % ctx.pa, ctx.pa);
            } else {
                uint64_t r = v % pow_u64(ctx.p, N.orders[j]);
                act.at(k, j) = div_pow_p(r, ctx.p, N.orders[j] - N.orders[k]);
            }
        }
    return make_finite_module(ctx, N.level, N.orders, std::move(act));
}

FiniteModule dot(const FiniteModule& N) {
    if (N.is_zero()) return N;
    return make_finite_module(N.ctx, N.level, N.orders, inverse(N.action));
}

FiniteModule finite_level_adjoint(const FiniteModule& N) { return pontryagin_dual(dot(N)); }

Mat trace_matrix(const FiniteModule& N, uint32_t target_level) {
    const RingContext& ctx = N.ctx;
    Mat g = N.action.pow(pow_u64(ctx.p, target_level));
    Mat acc(ctx, N.rank(), N.rank());
    Mat cur = Mat::identity(ctx, N.rank());
    for (uint32_t i = 0; i < ctx.p; ++i) {
        acc = acc + cur;
        if (i + 1 < ctx.p) cur = cur * g;
    }
    return acc;
}

Mat dual_map(const Mat& h, const std::vector<uint32_t>& src_orders,
             const std::vector<uint32_t>& dst_orders) {
    const RingContext& ctx = h.context();
    Mat r(ctx, uint32_t(src_orders.size()), uint32_t(dst_orders.size()));
    for (uint32_t j = 0; j < src_orders.size(); ++j)
        for (uint32_t i = 0; i < dst_orders.size(); ++i) {
            uint64_t v = h.at(i, j);
            if (src_orders[j] >= dst_orders[i]) {
                r.at(j, i) = mul(v, pow_u64(ctx.p, src_orders[j] - dst_orders[i]) % ctx.pa, ctx.pa);
            } else {
                uint64_t red = v % pow_u64(ctx.p, dst_orders[i]);
                r.at(j, i) = div_pow_p(red, ctx.p, dst_orders[i] - src_orders[j]);
            }
        }
    return r;
}

TorsionRankSplit zp_torsion_and_rank(const std::vector<uint32_t>& at_a,
                                     const std::vector<uint32_t>& at_a1, uint32_t a) {
    TorsionRankSplit out;
    size_t n = std::max(at_a.size(), at_a1.size());
    std::vector<uint32_t> x(at_a), y(at_a1);
    x.resize(n, 0);
    y.resize(n, 0);
    for (size_t i = 0; i < n; ++i) {
        if (x[i] == y[i]) {
            if (x[i] > 0) out.torsion_orders.push_back(x[i]);
        } else if (x[i] == a && y[i] == a + 1) {
            ++out.free_rank;
        } else {
            out.determined = false;
        }
    }
    return out;
}

// --- towers for elementary / square modules ------------------------------------

SquareModule make_square_module(RingContext ctx, uint32_t dim, std::vector<Series1> entries) {
    if (entries.size() != size_t(dim) * dim) throw input_error("square module needs dim^2 entries");
    SquareModule M{ctx, dim, std::move(entries)};
    if (series_determinant(M.entries, dim).is_zero())
        throw input_error("square presentation has zero determinant at precision (not torsion)");
    return M;
}

const RingContext& module_context(const ModuleInput& M) {
    return std::visit([](const auto& x) -> const RingContext& { return x.ctx; }, M);
}

namespace {

// Relation matrix of M/omega_n over the ambient (Z/p^a)^{d p^n}.
struct AmbientPresentation {
    uint32_t blocks;
    Mat relations;
    Mat gamma;  // ambient gamma action
};

AmbientPresentation ambient_presentation(const ModuleInput& M, uint32_t n,
                                         const RingContext& ctx) {
    if (std::holds_alternative<FiniteModule>(M)) {
        const FiniteModule& F = std::get<FiniteModule>(M);
        FiniteModule Fl = F.ctx == ctx
                              ? F
                              : make_finite_module(ctx, F.level, F.orders,
                                                   F.action.with_context(ctx));
        Mat phi = Fl.action.pow(pow_u64(ctx.p, n)) - Mat::identity(ctx, Fl.rank());
        Mat rel = hconcat(phi, order_relations(ctx, Fl.orders));
        return {1, std::move(rel), Fl.action};
    }
    OmegaRing R(ctx, n);
    const uint32_t rk = R.rank();
    Mat gamma_block = R.gamma_matrix();

    auto assemble_gamma = [&](uint32_t d) {
        Mat g(ctx, d * rk, d * rk);
        for (uint32_t b = 0; b < d; ++b)
            for (uint32_t i = 0; i < rk; ++i)
            for (uint32_t j = 0; j < rk; ++j) g.at(b * rk + i, b * rk + j) = gamma_block.at(i, j);
        return g;
    };

    if (std::holds_alternative<ElementaryModule>(M)) {
        const ElementaryModule& E = std::get<ElementaryModule>(M);
        uint32_t d = uint32_t(E.factors.size());
        Mat rel(ctx, d * rk, d * rk);
        for (uint32_t b = 0; b < d; ++b) {
            Mat blk = R.multiplication_matrix(E.factors[b].with_context(ctx));
            for (uint32_t i = 0; i < rk; ++i)
                for (uint32_t j = 0; j < rk; ++j) rel.at(b * rk + i, b * rk + j) = blk.at(i, j);
        }
        return {d, std::move(rel), assemble_gamma(d)};
    }

    const SquareModule& S = std::get<SquareModule>(M);
    uint32_t d = S.dim;
    Mat rel(ctx, d * rk, d * rk);
    for (uint32_t bi = 0; bi < d; ++bi)
        for (uint32_t bj = 0; bj < d; ++bj) {
            Mat blk = R.multiplication_matrix(S.at(bi, bj).with_context(ctx));
            for (uint32_t i = 0; i < rk; ++i)
                for (uint32_t j = 0; j < rk; ++j)
                    rel.at(bi * rk + i, bj * rk + j) = blk.at(i, j);
        }
    return {d, std::move(rel), assemble_gamma(d)};
}

}  // namespace

LevelQuotient coinvariants_at_level(const ModuleInput& M, uint32_t n, const RingContext& ctx) {
    AmbientPresentation P = ambient_presentation(M, n, ctx);
    QuotientStructure q = quotient_structure(ctx, P.relations.rows(), P.relations);
    LevelQuotient out;
    out.ambient_dim = P.relations.rows();
    out.coords = q;
    out.exponent_at_a = q.order_exponent();

    RingContext up = ctx.lifted();
    AmbientPresentation P1 = ambient_presentation(M, n, up);
    QuotientStructure q1 = quotient_structure(up, P1.relations.rows(), P1.relations);
    out.exponent_at_a1 = q1.order_exponent();
    out.finite = out.exponent_at_a == out.exponent_at_a1;

    uint32_t level = n;
    if (std::holds_alternative<FiniteModule>(M))
        level = std::min(n, std::get<FiniteModule>(M).level);
    out.mod = make_finite_module(ctx, level, q.orders, q.project * P.gamma * q.embed);
    return out;
}

LevelQuotient coinvariants_at_level(const ModuleInput& M, uint32_t n) {
    return coinvariants_at_level(M, n, module_context(M));
}

Mat ambient_trace(const ModuleInput& M, uint32_t n) {
    const RingContext& ctx = module_context(M);
    if (std::holds_alternative<FiniteModule>(M)) {
        const FiniteModule& F = std::get<FiniteModule>(M);
        return trace_matrix(F, n);
    }
    // blocks V_n -> V_{n+1}: x |-> omega_quotient_n * x  (lift then reduce)
    OmegaRing Rn(ctx, n), Rn1(ctx, n + 1);
    Series1 q = omega_quotient(ctx, n);
    std::vector<uint64_t> qbar = Rn1.reduce(q);
    uint32_t d = 1;
    if (std::holds_alternative<ElementaryModule>(M))
        d = uint32_t(std::get<ElementaryModule>(M).factors.size());
    else
        d = std::get<SquareModule>(M).dim;
    Mat tr(ctx, d * Rn1.rank(), d * Rn.rank());
    // column (b, j): q * T^j in V_{n+1}
    std::vector<uint64_t> tvec(Rn1.rank(), 0);
    if (Rn1.rank() > 1) tvec[1] = 1;
    std::vector<uint64_t> col = qbar;
    for (uint32_t j = 0; j < Rn.rank(); ++j) {
        for (uint32_t b = 0; b < d; ++b)
            for (uint32_t i = 0; i < Rn1.rank(); ++i)
                tr.at(b * Rn1.rank() + i, b * Rn.rank() + j) = col[i];
        if (j + 1 < Rn.rank()) col = Rn1.mul(col, tvec);
    }
    return tr;
}

Series1 series_determinant(const std::vector<Series1>& entries, uint32_t dim) {
    if (dim == 0) throw input_error("determinant of an empty matrix");
    if (dim > 8) throw input_error("series determinant supported for dim <= 8");
    const RingContext& ctx = entries[0].context();
    // cofactor expansion over the first row, recursing on index subsets
    std::vector<uint32_t> cols(dim);
    std::iota(cols.begin(), cols.end(), 0);
    struct Rec {
        const std::vector<Series1>& e;
        uint32_t dim;
        const RingContext& ctx;
        Series1 run(uint32_t row, std::vector<uint32_t>& cols) {
            if (cols.size() == 1) return e[size_t(row) * dim + cols[0]];
            Series1 acc(ctx);
            for (uint32_t k = 0; k < cols.size(); ++k) {
                const Series1& pivot = e[size_t(row) * dim + cols[k]];
                if (pivot.is_zero()) continue;
                std::vector<uint32_t> rest;
                for (uint32_t t = 0; t < cols.size(); ++t)
                    if (t != k) rest.push_back(cols[t]);
                Series1 minor = run(row + 1, rest);
                Series1 term = pivot * minor;
                acc = (k % 2 == 0) ? acc + term : acc - term;
            }
            return acc;
        }
    } rec{entries, dim, ctx};
    return rec.run(0, cols);
}

Series1 char_series(const ModuleInput& M) {
    if (std::holds_alternative<FiniteModule>(M))
        throw input_error("char_series expects an elementary or square-presented module");
    const RingContext& ctx = module_context(M);
    if (std::holds_alternative<ElementaryModule>(M)) {
        const ElementaryModule& E = std::get<ElementaryModule>(M);
        Series1 prod = Series1::one(ctx);
        for (const Series1& f : E.factors) {
            if (f.is_zero())
                throw indeterminate_at_precision("elementary factor vanishes at precision");
            prod = prod * f;
        }
        return canonical_char(prod);
    }
    const SquareModule& S = std::get<SquareModule>(M);
    Series1 det = series_determinant(S.entries, S.dim);
    if (det.is_zero())
        throw indeterminate_at_precision("not torsion at precision (det = 0)");
    return canonical_char(det);
}

GrowthFit iwasawa_invariants_via_growth(const ModuleInput& M, uint32_t n_lo, uint32_t n_hi) {
    if (n_hi < n_lo + 2) throw input_error("growth fit needs at least three consecutive levels");
    const RingContext& ctx = module_context(M);
    GrowthFit fit;
    for (uint32_t n = n_lo; n <= n_hi; ++n) {
        LevelQuotient lq = coinvariants_at_level(M, n);
        if (!lq.finite)
            throw undetermined_at_precision("coinvariants not finite at level " + std::to_string(n));
        fit.exponents.push_back(lq.mod.order_exponent());
    }
    // fit on the top three levels
    size_t top = fit.exponents.size() - 1;
    int64_t e2 = fit.exponents[top], e1 = fit.exponents[top - 1], e0 = fit.exponents[top - 2];
    uint32_t n2 = n_hi;
    int64_t d2 = (e2 - e1) - (e1 - e0);
    int64_t denom = int64_t(pow_u64(ctx.p, n2 - 2)) * (ctx.p - 1) * (ctx.p - 1);
    if (d2 % denom != 0 || d2 < 0)
        throw undetermined_at_precision("growth exponents do not fit the Iwasawa form (mu)");
    int64_t mu = d2 / denom;
    int64_t lam = (e2 - e1) - mu * int64_t(pow_u64(ctx.p, n2 - 1)) * (ctx.p - 1);
    if (lam < 0) throw undetermined_at_precision("growth exponents do not fit the Iwasawa form (lambda)");
    int64_t nu = e2 - mu * int64_t(pow_u64(ctx.p, n2)) - lam * int64_t(n2);
    fit.mu = uint32_t(mu);
    fit.lambda = uint32_t(lam);
    fit.nu = nu;
    for (uint32_t i = 0; i < fit.exponents.size(); ++i) {
        uint32_t n = n_lo + i;
        int64_t pred = mu * int64_t(pow_u64(ctx.p, n)) + lam * int64_t(n) + nu;
        fit.residuals.push_back(int64_t(fit.exponents[i]) - pred);
    }
    fit.exact = fit.residuals[top] == 0 && fit.residuals[top - 1] == 0 && fit.residuals[top - 2] == 0;
    return fit;
}

bool is_pseudo_null(const ModuleInput& M) {
    if (std::holds_alternative<FiniteModule>(M)) return true;  // finite = pseudo-null here
    Series1 cs = char_series(M);
    auto [mu, lambda] = mu_lambda(cs);
    if (mu != 0 || lambda != 0) return false;
    uint32_t first = 0;
    for (uint32_t n = 0; n <= 2; ++n) {
        LevelQuotient lq = coinvariants_at_level(M, n);
        if (!lq.finite) return false;
        if (n == 0) first = lq.mod.order_exponent();
        else if (lq.mod.order_exponent() != first) return false;
    }
    return true;
}

}  // namespace iwa
