#include "iwa/padic.hpp"

#include <algorithm>
#include <numeric>

namespace iwa {

namespace {

bool is_odd_prime(uint32_t p) {
    if (p < 3 || p % 2 == 0) return false;
    for (uint32_t d = 3; uint64_t(d) * d <= p; d += 2)
        if (p % d == 0) return false;
    return true;
}

}  // namespace

RingContext RingContext::make(uint32_t p, uint32_t a, uint32_t m, uint32_t vars) {
    if (!is_odd_prime(p)) throw input_error("p must be an odd prime");
    if (a < 1) throw input_error("precision exponent must be >= 1");
    if (m < 1) throw input_error("truncation order must be >= 1");
    if (vars != 1 && vars != 2) throw input_error("vars must be 1 or 2");
    // Leave headroom for computations lifted to precision a+1.
    uint64_t pa = 1;
    for (uint32_t i = 0; i < a + 1; ++i) {
        if (pa > (uint64_t(1) << 62) / p) throw input_error("p^(a+1) exceeds the 62-bit budget");
        pa *= p;
    }
    RingContext c;
    c.p = p;
    c.a = a;
    c.m = m;
    c.vars = vars;
    c.pa = pa / p;
    return c;
}

RingContext RingContext::reduced(uint32_t mu) const {
    if (mu >= a) throw indeterminate_at_precision("precision fully consumed (mu >= a)");
    return make(p, a - mu, m, vars);
}

void require_same_context(const RingContext& x, const RingContext& y, const char* where) {
    if (x != y) throw context_mismatch(std::string("ring context mismatch in ") + where);
}

namespace modarith {

uint64_t add(uint64_t x, uint64_t y, uint64_t pa) {
    uint64_t s = x + y;
    return s >= pa ? s - pa : s;
}

uint64_t sub(uint64_t x, uint64_t y, uint64_t pa) { return x >= y ? x - y : x + pa - y; }

uint64_t mul(uint64_t x, uint64_t y, uint64_t pa) {
    return uint64_t((unsigned __int128)x * y % pa);
}

uint64_t neg(uint64_t x, uint64_t pa) { return x == 0 ? 0 : pa - x; }

uint64_t pow(uint64_t x, uint64_t e, uint64_t pa) {
    uint64_t r = 1 % pa, b = x % pa;
    while (e) {
        if (e & 1) r = mul(r, b, pa);
        b = mul(b, b, pa);
        e >>= 1;
    }
    return r;
}

uint64_t inv(uint64_t x, uint64_t pa) {
    // extended Euclid on (x, pa)
    int64_t t = 0, newt = 1;
    int64_t r = int64_t(pa), newr = int64_t(x % pa);
    while (newr != 0) {
        int64_t q = r / newr;
        std::swap(t -= q * newt, newt);
        std::swap(r -= q * newr, newr);
    }
    if (r != 1) throw not_invertible("element is not invertible at this precision");
    return t < 0 ? uint64_t(t + int64_t(pa)) : uint64_t(t);
}

Valuation val(uint64_t r, uint32_t p, uint32_t a) {
    if (r == 0) return {a, true};
    uint32_t v = 0;
    while (v < a && r % p == 0) {
        r /= p;
        ++v;
    }
    return {v, false};
}

uint64_t div_pow_p(uint64_t r, uint32_t p, uint32_t k) {
    for (uint32_t i = 0; i < k; ++i) {
        if (r % p != 0) throw error("internal: inexact division by p");
        r /= p;
    }
    return r;
}

uint64_t pow_u64(uint64_t b, uint32_t e) {
    uint64_t r = 1;
    for (uint32_t i = 0; i < e; ++i) {
        if (r > (uint64_t(1) << 62) / b) throw error("integer power exceeds the 62-bit budget");
        r *= b;
    }
    return r;
}

}  // namespace modarith

Mat Mat::identity(RingContext ctx, uint32_t n) {
    Mat I(ctx, n, n);
    for (uint32_t i = 0; i < n; ++i) I.at(i, i) = 1 % ctx.pa;
    return I;
}

bool Mat::is_zero() const {
    return std::all_of(v_.begin(), v_.end(), [](uint64_t x) { return x == 0; });
}

Mat Mat::operator*(const Mat& o) const {
    require_same_context(ctx_, o.ctx_, "matrix *");
    if (cols_ != o.rows_) throw error("matrix dimension mismatch in *");
    Mat r(ctx_, rows_, o.cols_);
    for (uint32_t i = 0; i < rows_; ++i)
        for (uint32_t k = 0; k < cols_; ++k) {
            uint64_t x = at(i, k);
            if (x == 0) continue;
            for (uint32_t j = 0; j < o.cols_; ++j)
                r.at(i, j) = modarith::add(r.at(i, j), modarith::mul(x, o.at(k, j), ctx_.pa), ctx_.pa);
        }
    return r;
}

Mat Mat::operator+(const Mat& o) const {
    require_same_context(ctx_, o.ctx_, "matrix +");
    if (rows_ != o.rows_ || cols_ != o.cols_) throw error("matrix dimension mismatch in +");
    Mat r = *this;
    for (size_t i = 0; i < v_.size(); ++i) r.v_[i] = modarith::add(v_[i], o.v_[i], ctx_.pa);
    return r;
}

Mat Mat::operator-(const Mat& o) const {
    require_same_context(ctx_, o.ctx_, "matrix -");
    if (rows_ != o.rows_ || cols_ != o.cols_) throw error("matrix dimension mismatch in -");
    Mat r = *this;
    for (size_t i = 0; i < v_.size(); ++i) r.v_[i] = modarith::sub(v_[i], o.v_[i], ctx_.pa);
    return r;
}

Mat Mat::scaled(uint64_t c) const {
    Mat r = *this;
    for (auto& x : r.v_) x = modarith::mul(x, c, ctx_.pa);
    return r;
}

Mat Mat::transpose() const {
    Mat r(ctx_, cols_, rows_);
    for (uint32_t i = 0; i < rows_; ++i)
        for (uint32_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
}

Mat Mat::pow(uint64_t e) const {
    if (rows_ != cols_) throw error("matrix power needs a square matrix");
    Mat r = identity(ctx_, rows_);
    Mat b = *this;
    while (e) {
        if (e & 1) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}

void Mat::swap_rows(uint32_t i, uint32_t j) {
    if (i == j) return;
    for (uint32_t c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
}

void Mat::swap_cols(uint32_t i, uint32_t j) {
    if (i == j) return;
    for (uint32_t r = 0; r < rows_; ++r) std::swap(at(r, i), at(r, j));
}

void Mat::add_row(uint32_t i, uint32_t k, uint64_t c) {
    for (uint32_t j = 0; j < cols_; ++j)
        at(i, j) = modarith::add(at(i, j), modarith::mul(c, at(k, j), ctx_.pa), ctx_.pa);
}

void Mat::add_col(uint32_t j, uint32_t k, uint64_t c) {
    for (uint32_t i = 0; i < rows_; ++i)
        at(i, j) = modarith::add(at(i, j), modarith::mul(c, at(i, k), ctx_.pa), ctx_.pa);
}

void Mat::scale_row(uint32_t i, uint64_t c) {
    for (uint32_t j = 0; j < cols_; ++j) at(i, j) = modarith::mul(at(i, j), c, ctx_.pa);
}

Mat Mat::with_context(const RingContext& c) const {
    if (c.p != ctx_.p) throw context_mismatch("with_context requires equal p");
    Mat r(c, rows_, cols_);
    for (size_t i = 0; i < v_.size(); ++i) r.v_[i] = v_[i] % c.pa;
    return r;
}

std::vector<uint64_t> Mat::apply(const std::vector<uint64_t>& x) const {
    if (x.size() != cols_) throw error("vector dimension mismatch in apply");
    std::vector<uint64_t> y(rows_, 0);
    for (uint32_t i = 0; i < rows_; ++i) {
        unsigned __int128 acc = 0;
        for (uint32_t j = 0; j < cols_; ++j) acc += (unsigned __int128)at(i, j) * x[j] % ctx_.pa;
        y[i] = uint64_t(acc % ctx_.pa);
    }
    return y;
}

Mat SmithForm::diagonal_matrix(const RingContext& ctx, uint32_t rows, uint32_t cols) const {
    Mat d(ctx, rows, cols);
    for (uint32_t i = 0; i < exponents.size(); ++i)
        if (exponents[i] < ctx.a) d.at(i, i) = modarith::pow_u64(ctx.p, exponents[i]);
    return d;
}

SmithForm smith_normal_form(const Mat& A) {
    const RingContext& ctx = A.context();
    const uint32_t r = A.rows(), c = A.cols();
    const uint32_t k = std::min(r, c);
    Mat work = A;
    Mat L = Mat::identity(ctx, r);
    Mat R = Mat::identity(ctx, c);
    std::vector<uint32_t> exps(k, ctx.a);

    for (uint32_t step = 0; step < k; ++step) {
        // pivot of minimal valuation, ties by lowest row then column
        uint32_t bi = step, bj = step;
        uint32_t best = ctx.a + 1;
        for (uint32_t i = step; i < r; ++i)
            for (uint32_t j = step; j < c; ++j) {
                Valuation v = modarith::val(work.at(i, j), ctx.p, ctx.a);
                if (v.saturated) continue;
                if (v.value < best) {
                    best = v.value;
                    bi = i;
                    bj = j;
                }
            }
        if (best > ctx.a) break;  // remaining block is zero at precision

        work.swap_rows(step, bi);
        L.swap_rows(step, bi);
        work.swap_cols(step, bj);
        R.swap_cols(step, bj);

        // normalize the pivot to exactly p^best
        uint64_t piv = work.at(step, step);
        uint64_t unit = modarith::div_pow_p(piv, ctx.p, best);
        uint64_t uinv = modarith::inv(unit, ctx.pa);
        work.scale_row(step, uinv);
        L.scale_row(step, uinv);

        for (uint32_t i = step + 1; i < r; ++i) {
            uint64_t e = work.at(i, step);
            if (e == 0) continue;
            uint64_t q = modarith::div_pow_p(e, ctx.p, best);  // entry val >= pivot val
            uint64_t nq = modarith::neg(q, ctx.pa);
            work.add_row(i, step, nq);
            L.add_row(i, step, nq);
        }
        for (uint32_t j = step + 1; j < c; ++j) {
            uint64_t e = work.at(step, j);
            if (e == 0) continue;
            uint64_t q = modarith::div_pow_p(e, ctx.p, best);
            uint64_t nq = modarith::neg(q, ctx.pa);
            work.add_col(j, step, nq);
            R.add_col(j, step, nq);
        }
        exps[step] = best;
    }

    // exps is non-decreasing by pivot minimality; flip to the descending
    // convention used for invariant-factor profiles.
    std::vector<uint32_t> desc(exps.rbegin(), exps.rend());
    Mat Lp(ctx, r, r), Rp(ctx, c, c);
    for (uint32_t i = 0; i < r; ++i) {
        uint32_t src = i < k ? (k - 1 - i) : i;
        for (uint32_t j = 0; j < r; ++j) Lp.at(i, j) = L.at(src, j);
    }
    for (uint32_t j = 0; j < c; ++j) {
        uint32_t src = j < k ? (k - 1 - j) : j;
        for (uint32_t i = 0; i < c; ++i) Rp.at(i, j) = R.at(i, src);
    }
    return {std::move(Lp), std::move(Rp), std::move(desc)};
}

std::vector<uint32_t> cokernel_exponents(const Mat& A) {
    const RingContext& ctx = A.context();
    SmithForm s = smith_normal_form(A);
    std::vector<uint32_t> out;
    for (uint32_t i = s.exponents.size(); i < A.rows(); ++i) out.push_back(ctx.a);
    for (uint32_t e : s.exponents)
        if (e > 0) out.push_back(std::min(e, ctx.a));
    std::sort(out.rbegin(), out.rend());
    return out;
}

Mat kernel_generators(const Mat& A) {
    const RingContext& ctx = A.context();
    SmithForm s = smith_normal_form(A);
    const uint32_t k = uint32_t(s.exponents.size());
    std::vector<std::vector<uint64_t>> gens;
    for (uint32_t i = 0; i < k; ++i) {
        if (s.exponents[i] == 0) continue;  // unit diagonal entry: no kernel
        uint32_t coexp = ctx.a - std::min(s.exponents[i], ctx.a);
        std::vector<uint64_t> e(A.cols(), 0);
        e[i] = coexp == 0 ? 1 : modarith::pow_u64(ctx.p, coexp);
        // the generator is p^{a-e_i} * (column i of R); full column for zero entries
        gens.push_back(std::move(e));
    }
    for (uint32_t j = k; j < A.cols(); ++j) {
        std::vector<uint64_t> e(A.cols(), 0);
        e[j] = 1;
        gens.push_back(std::move(e));
    }
    Mat G(ctx, A.cols(), uint32_t(gens.size()));
    for (uint32_t j = 0; j < gens.size(); ++j) {
        // map through R: kernel of A = R * kernel of diagonal
        for (uint32_t i = 0; i < A.cols(); ++i) {
            unsigned __int128 acc = 0;
            for (uint32_t t = 0; t < A.cols(); ++t)
                acc += (unsigned __int128)s.right.at(i, t) * gens[j][t] % ctx.pa;
            G.at(i, j) = uint64_t(acc % ctx.pa);
        }
    }
    return G;
}

std::optional<std::vector<uint64_t>> solve(const Mat& A, const std::vector<uint64_t>& b) {
    const RingContext& ctx = A.context();
    if (b.size() != A.rows()) throw error("dimension mismatch in solve");
    SmithForm s = smith_normal_form(A);
    std::vector<uint64_t> lb = s.left.apply(b);
    const uint32_t k = uint32_t(s.exponents.size());
    std::vector<uint64_t> w(A.cols(), 0);
    for (uint32_t i = 0; i < A.rows(); ++i) {
        uint64_t rhs = lb[i];
        if (i >= k || s.exponents[i] >= ctx.a) {
            if (rhs != 0) return std::nullopt;
            continue;
        }
        Valuation v = modarith::val(rhs, ctx.p, ctx.a);
        if (!v.saturated && v.value < s.exponents[i]) return std::nullopt;
        w[i] = modarith::div_pow_p(rhs, ctx.p, s.exponents[i]);
    }
    return s.right.apply(w);
}

Mat inverse(const Mat& A) {
    const RingContext& ctx = A.context();
    if (A.rows() != A.cols()) throw error("inverse needs a square matrix");
    const uint32_t n = A.rows();
    Mat work = A;
    Mat inv = Mat::identity(ctx, n);
    for (uint32_t col = 0; col < n; ++col) {
        uint32_t piv = n;
        for (uint32_t i = col; i < n; ++i)
            if (modarith::val(work.at(i, col), ctx.p, ctx.a).is_unit()) {
                piv = i;
                break;
            }
        if (piv == n) throw not_invertible("matrix is not invertible at this precision");
        work.swap_rows(col, piv);
        inv.swap_rows(col, piv);
        uint64_t u = modarith::inv(work.at(col, col), ctx.pa);
        work.scale_row(col, u);
        inv.scale_row(col, u);
        for (uint32_t i = 0; i < n; ++i) {
            if (i == col) continue;
            uint64_t e = work.at(i, col);
            if (e == 0) continue;
            uint64_t ne = modarith::neg(e, ctx.pa);
            work.add_row(i, col, ne);
            inv.add_row(i, col, ne);
        }
    }
    return inv;
}

bool invertible_mod_p(const Mat& A) {
    if (A.rows() != A.cols()) return false;
    try {
        (void)inverse(A);
        return true;
    } catch (const not_invertible&) {
        return false;
    }
}

uint32_t QuotientStructure::order_exponent() const {
    return std::accumulate(orders.begin(), orders.end(), uint32_t(0));
}

QuotientStructure quotient_structure(const RingContext& ctx, uint32_t rows, const Mat& relations) {
    if (relations.rows() != rows) throw error("relation matrix has wrong height");
    SmithForm s = smith_normal_form(relations);
    // In coordinates y = L x the relations become diagonal; exponent per slot,
    // rows beyond the diagonal are free at precision (exponent a).
    std::vector<uint32_t> aligned(rows, ctx.a);
    for (uint32_t i = 0; i < s.exponents.size(); ++i) aligned[i] = std::min(s.exponents[i], ctx.a);
    for (uint32_t i = uint32_t(s.exponents.size()); i < rows; ++i) aligned[i] = ctx.a;

    std::vector<uint32_t> kept;
    for (uint32_t i = 0; i < rows; ++i)
        if (aligned[i] > 0) kept.push_back(i);

    Mat Linv = inverse(s.left);
    QuotientStructure q;
    q.project = Mat(ctx, uint32_t(kept.size()), rows);
    q.embed = Mat(ctx, rows, uint32_t(kept.size()));
    q.orders.reserve(kept.size());
    for (uint32_t t = 0; t < kept.size(); ++t) {
        q.orders.push_back(aligned[kept[t]]);
        for (uint32_t j = 0; j < rows; ++j) q.project.at(t, j) = s.left.at(kept[t], j);
        for (uint32_t i = 0; i < rows; ++i) q.embed.at(i, t) = Linv.at(i, kept[t]);
    }
    // descending order: the diagonal block is already descending, but rows
    // beyond the diagonal carry exponent a and sit at the back of L's index
    // range; stable-sort the kept slots by exponent.
    std::vector<uint32_t> perm(kept.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](uint32_t x, uint32_t y) { return q.orders[x] > q.orders[y]; });
    QuotientStructure out;
    out.project = Mat(ctx, uint32_t(kept.size()), rows);
    out.embed = Mat(ctx, rows, uint32_t(kept.size()));
    for (uint32_t t = 0; t < perm.size(); ++t) {
        out.orders.push_back(q.orders[perm[t]]);
        for (uint32_t j = 0; j < rows; ++j) out.project.at(t, j) = q.project.at(perm[t], j);
        for (uint32_t i = 0; i < rows; ++i) out.embed.at(i, t) = q.embed.at(i, perm[t]);
    }
    return out;
}

Mat order_relations(const RingContext& ctx, const std::vector<uint32_t>& orders) {
    Mat D(ctx, uint32_t(orders.size()), uint32_t(orders.size()));
    for (uint32_t i = 0; i < orders.size(); ++i)
        D.at(i, i) = orders[i] >= ctx.a ? 0 : modarith::pow_u64(ctx.p, orders[i]);
    return D;
}

namespace {

Mat hconcat(const Mat& A, const Mat& B) {
    if (A.rows() != B.rows()) throw error("hconcat row mismatch");
    Mat r(A.context(), A.rows(), A.cols() + B.cols());
    for (uint32_t i = 0; i < A.rows(); ++i) {
        for (uint32_t j = 0; j < A.cols(); ++j) r.at(i, j) = A.at(i, j);
        for (uint32_t j = 0; j < B.cols(); ++j) r.at(i, A.cols() + j) = B.at(i, j);
    }
    return r;
}

}  // namespace

SubgroupStructure subgroup_structure(const Mat& gens, const std::vector<uint32_t>& ambient_orders) {
    const RingContext& ctx = gens.context();
    if (gens.rows() != ambient_orders.size()) throw error("subgroup ambient mismatch");
    Mat D = order_relations(ctx, ambient_orders);
    // relations among the generators: coefficient vectors c with gens*c in im(D)
    Mat K = kernel_generators(hconcat(gens, D));
    Mat rel(ctx, gens.cols(), K.cols());
    for (uint32_t i = 0; i < gens.cols(); ++i)
        for (uint32_t j = 0; j < K.cols(); ++j) rel.at(i, j) = K.at(i, j);
    QuotientStructure q = quotient_structure(ctx, gens.cols(), rel);
    SubgroupStructure s;
    s.orders = q.orders;
    s.gens = gens * q.embed;
    return s;
}

std::optional<std::vector<uint64_t>> express(const Mat& gens,
                                             const std::vector<uint32_t>& ambient_orders,
                                             const std::vector<uint64_t>& target) {
    const RingContext& ctx = gens.context();
    Mat D = order_relations(ctx, ambient_orders);
    Mat A = hconcat(gens, D);
    auto sol = solve(A, target);
    if (!sol) return std::nullopt;
    sol->resize(gens.cols());
    return sol;
}

}  // namespace iwa
