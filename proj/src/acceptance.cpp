#include "iwa/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>

#include "iwa/adjoint.hpp"

namespace iwa {

namespace {

using modarith::inv;
using modarith::mul;
using modarith::neg;
using modarith::pow_u64;
using modarith::sub;

Series1 random_unit(const RingContext& c, std::mt19937_64& rng) {
    std::uniform_int_distribution<uint64_t> d(0, c.pa - 1);
    Series1 u(c);
    uint64_t c0 = d(rng);
    while (c0 % c.p == 0) c0 = d(rng);
    u.set_coeff(0, c0);
    for (uint32_t i = 1; i < c.m; ++i) u.set_coeff(i, d(rng));
    return u;
}

Series1 random_distinguished(const RingContext& c, uint32_t deg, std::mt19937_64& rng) {
    std::uniform_int_distribution<uint64_t> d(0, c.pa / c.p - 1);
    Series1 P(c);
    P.set_coeff(deg, 1);
    for (uint32_t i = 0; i < deg; ++i) P.set_coeff(i, d(rng) * c.p % c.pa);
    return P;
}

// T - p*u with u a unit: cotorsion at every level (the zero never meets a
// p-power root of unity).
Series1 random_split_factor(const RingContext& c, std::mt19937_64& rng) {
    std::uniform_int_distribution<uint64_t> d(1, c.pa / c.p - 1);
    uint64_t u = d(rng);
    while (u % c.p == 0) u = d(rng);
    Series1 f(c);
    f.set_coeff(0, neg(c.p * u % c.pa, c.pa));
    f.set_coeff(1, 1);
    return f;
}

// --- criterion 1 ---------------------------------------------------------------

CriterionResult weierstrass_reconstruction(uint64_t seed) {
    CriterionResult res{1, "Weierstrass reconstruction (>= 200 seeded series)", true, ""};
    int total = 0;
    for (uint32_t p : {3u, 5u}) {
        RingContext c = RingContext::make(p, 8, 32);
        std::mt19937_64 rng(seed + p);
        for (int t = 0; t < 110; ++t) {
            uint32_t mu = uint32_t(rng() % 4);      // <= 3
            uint32_t lam = uint32_t(rng() % 9);     // <= 8
            Series1 u = random_unit(c, rng);
            Series1 P = random_distinguished(c, lam, rng);
            Series1 f = (u * P).scaled(pow_u64(p, mu));
            WeierstrassData w = weierstrass_prepare(f);
            if (w.mu != mu || w.lambda != lam || weierstrass_reconstruct(w, c) != f) {
                res.pass = false;
                res.detail = "mismatch at p=" + std::to_string(p) + " draw " + std::to_string(t);
                return res;
            }
            ++total;
        }
    }
    res.detail = std::to_string(total) + " series reconstructed exactly";
    return res;
}

// --- criterion 2 ---------------------------------------------------------------

std::vector<ElementaryModule> seeded_elementary_corpus(const RingContext& c, uint64_t seed) {
    std::mt19937_64 rng(seed + 17);
    std::vector<ElementaryModule> corpus;
    for (int t = 0; t < 20; ++t) {
        uint32_t mu = uint32_t(rng() % 2);                    // <= 1
        uint32_t lam = 1 + uint32_t(rng() % 3);               // 1..3
        Series1 f = Series1::one(c);
        for (uint32_t i = 0; i < lam; ++i) f = f * random_split_factor(c, rng);
        f = f.scaled(pow_u64(c.p, mu));
        corpus.push_back(ElementaryModule{c, {f}});
    }
    return corpus;
}

CriterionResult adjoint_cross_check(uint64_t seed) {
    CriterionResult res{2, "Adjoint limit vs closed form (20 seeded modules)", true, ""};
    RingContext c = RingContext::make(3, 8, 32);
    auto corpus = seeded_elementary_corpus(c, seed);
    int idx = 0;
    for (const ElementaryModule& M : corpus) {
        AdjointTower tower = adjoint_via_limit(ModuleInput{M}, 3);
        ElementaryModule closed = adjoint_elementary(M, /*dotted=*/true);
        GrowthFit closed_fit = iwasawa_invariants_via_growth(ModuleInput{closed}, 0, 3);
        for (uint32_t n = 0; n <= 3; ++n) {
            LevelQuotient q = coinvariants_at_level(ModuleInput{closed}, n);
            if (!q.finite || q.mod.order_exponent() != tower.exponents[n]) {
                res.pass = false;
                res.detail = "order mismatch at module " + std::to_string(idx) + " level " +
                             std::to_string(n);
                return res;
            }
        }
        if (!tower.fit || !tower.fit->exact || !closed_fit.exact ||
            tower.fit->mu != closed_fit.mu || tower.fit->lambda != closed_fit.lambda) {
            res.pass = false;
            res.detail = "fitted invariants disagree at module " + std::to_string(idx);
            return res;
        }
        ++idx;
    }
    res.detail = "20 modules, levels 0..3, exact agreement";
    return res;
}

// --- criterion 3 ---------------------------------------------------------------

CriterionResult pseudo_null_annihilation(uint64_t) {
    CriterionResult res{3, "Pseudo-null annihilation (finite inputs die by level 3)", true, ""};
    RingContext c = RingContext::make(3, 8, 32);
    std::vector<FiniteModule> inputs;
    auto cyc = [&](uint32_t level, uint32_t order, uint64_t g) {
        Mat m(c, 1, 1);
        m.at(0, 0) = g;
        return make_finite_module(c, level, {order}, m);
    };
    inputs.push_back(cyc(0, 1, 1));
    inputs.push_back(cyc(0, 3, 1));
    inputs.push_back(cyc(1, 2, 4));
    inputs.push_back(cyc(2, 3, 4));
    {
        Mat g(c, 3, 3);
        g.at(0, 1) = 1;
        g.at(1, 2) = 1;
        g.at(2, 0) = 1;
        inputs.push_back(make_finite_module(c, 1, {1, 1, 1}, g));
    }
    inputs.push_back(direct_sum(cyc(0, 2, 1), cyc(1, 1, 1)));
    int idx = 0;
    for (const FiniteModule& F : inputs) {
        AdjointTower tower = adjoint_via_limit(ModuleInput{F}, 6);
        for (uint32_t n = 0; n <= 3; ++n)
            if (tower.stable_image_exponents[n] != 0) {
                res.pass = false;
                res.detail = "input " + std::to_string(idx) + " survives at level " +
                             std::to_string(n);
                return res;
            }
        ++idx;
    }
    res.detail = std::to_string(idx) + " finite inputs annihilated by level 3";
    return res;
}

// --- criterion 4 ---------------------------------------------------------------

CriterionResult order_identity(uint64_t seed) {
    CriterionResult res{4, "Order identity |a1_n(M_n)| = |a1(M)_n| (20 square modules)", true, ""};
    RingContext c = RingContext::make(3, 8, 32);
    std::mt19937_64 rng(seed + 41);
    std::uniform_int_distribution<uint64_t> d(0, c.pa - 1);
    for (int t = 0; t < 20; ++t) {
        uint32_t dim = 2 + uint32_t(rng() % 2);  // 2..3
        // A = U diag(f_i) V with unimodular U, V assembled from shear matrices
        std::vector<Series1> A(size_t(dim) * dim, Series1(c));
        for (uint32_t i = 0; i < dim; ++i)
            A[size_t(i) * dim + i] = random_split_factor(c, rng);
        auto shear = [&](bool left) {
            uint32_t i = uint32_t(rng() % dim), j = uint32_t(rng() % dim);
            if (i == j) return;
            Series1 s = Series1::from_coeffs(c, {d(rng) % 9, d(rng) % 9});
            // row_i += s * row_j (left) or col_i += s * col_j (right)
            for (uint32_t k = 0; k < dim; ++k) {
                if (left)
                    A[size_t(i) * dim + k] = A[size_t(i) * dim + k] + s * A[size_t(j) * dim + k];
                else
                    A[size_t(k) * dim + i] = A[size_t(k) * dim + i] + s * A[size_t(k) * dim + j];
            }
        };
        for (int s = 0; s < 4; ++s) shear(rng() % 2 == 0);
        SquareModule M = make_square_module(c, dim, A);
        for (uint32_t n = 0; n <= 2; ++n) {
            OrderIdentityReport rep = verify_order_identity(ModuleInput{M}, n);
            if (!rep.holds) {
                res.pass = false;
                res.detail = "identity fails at draw " + std::to_string(t) + " level " +
                             std::to_string(n);
                return res;
            }
        }
    }
    res.detail = "20 square presentations, levels 0..2, exact";
    return res;
}

// --- criterion 5 ---------------------------------------------------------------

// all alternating forms over F_p on (Z/p)^r, fast path
bool scan_rank_one_type(uint32_t p, uint32_t r, uint64_t& scanned, uint64_t& nondeg,
                        std::string& fail) {
    const uint32_t pairs = r * (r - 1) / 2;
    uint64_t total = 1;
    for (uint32_t i = 0; i < pairs; ++i) total *= p;
    std::vector<uint32_t> entry(pairs);
    std::vector<std::vector<uint32_t>> m(r, std::vector<uint32_t>(r, 0));
    for (uint64_t code = 0; code < total; ++code) {
        uint64_t rest = code;
        uint32_t k = 0;
        for (uint32_t i = 0; i < r; ++i)
            for (uint32_t j = i + 1; j < r; ++j) {
                entry[k] = uint32_t(rest % p);
                rest /= p;
                m[i][j] = entry[k];
                m[j][i] = entry[k] == 0 ? 0 : p - entry[k];
                ++k;
            }
        ++scanned;
        // rank over F_p by elimination
        std::vector<std::vector<uint32_t>> w = m;
        uint32_t rank = 0;
        for (uint32_t col = 0; col < r; ++col) {
            uint32_t piv = r;
            for (uint32_t i = rank; i < r; ++i)
                if (w[i][col] != 0) {
                    piv = i;
                    break;
                }
            if (piv == r) continue;
            std::swap(w[rank], w[piv]);
            uint32_t pinv = uint32_t(inv(w[rank][col], p));
            for (uint32_t j = 0; j < r; ++j) w[rank][j] = w[rank][j] * pinv % p;
            for (uint32_t i = 0; i < r; ++i) {
                if (i == rank || w[i][col] == 0) continue;
                uint32_t f = w[i][col];
                for (uint32_t j = 0; j < r; ++j)
                    w[i][j] = (w[i][j] + (p - f) * w[rank][j]) % p;
            }
            ++rank;
        }
        if (rank < r) continue;  // degenerate
        ++nondeg;
        if (r % 2 != 0) {
            fail = "nondegenerate alternating form found on an odd-rank F_p space";
            return false;
        }
        // hyperbolic reduction witness over F_p
        std::vector<std::vector<uint32_t>> basis;
        for (uint32_t i = 0; i < r; ++i) {
            std::vector<uint32_t> e(r, 0);
            e[i] = 1;
            basis.push_back(e);
        }
        auto val = [&](const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
            uint64_t acc = 0;
            for (uint32_t i = 0; i < r; ++i) {
                if (a[i] == 0) continue;
                for (uint32_t j = 0; j < r; ++j)
                    if (b[j]) acc += uint64_t(a[i]) * m[i][j] % p * b[j];
            }
            return uint32_t(acc % p);
        };
        uint32_t planes = 0;
        while (!basis.empty()) {
            int32_t bs = -1, bt = -1;
            for (uint32_t s = 0; s < basis.size() && bs < 0; ++s)
                for (uint32_t t2 = 0; t2 < basis.size(); ++t2)
                    if (s != t2 && val(basis[s], basis[t2]) != 0) {
                        bs = int32_t(s);
                        bt = int32_t(t2);
                        break;
                    }
            if (bs < 0) {
                fail = "nondegenerate form without a hyperbolic pair";
                return false;
            }
            std::vector<uint32_t> x = basis[uint32_t(bs)], y = basis[uint32_t(bt)];
            uint32_t vinv = uint32_t(inv(val(x, y), p));
            for (auto& yi : y) yi = yi * vinv % p;
            std::vector<std::vector<uint32_t>> next;
            for (uint32_t g = 0; g < basis.size(); ++g) {
                if (int32_t(g) == bs || int32_t(g) == bt) continue;
                uint32_t a1 = val(basis[g], y);
                uint32_t a2 = val(basis[g], x);
                std::vector<uint32_t> z = basis[g];
                for (uint32_t i = 0; i < r; ++i)
                    z[i] = (z[i] + (p - a1) * x[i] + a2 * y[i]) % p;
                if (std::any_of(z.begin(), z.end(), [](uint32_t v) { return v != 0; }))
                    next.push_back(std::move(z));
            }
            basis = std::move(next);
            ++planes;
        }
        if (2 * planes != r) {
            fail = "hyperbolic reduction did not fill the space";
            return false;
        }
    }
    return true;
}

CriterionResult square_order_exhaustive(uint64_t) {
    CriterionResult res{5, "Square order theorem exhaustive over p = 3, |N| <= 3^6", true, ""};
    const uint32_t p = 3;
    RingContext c = RingContext::make(3, 6, 4);
    uint64_t scanned = 0, nondeg = 0;
    std::string fail;

    // group types: partitions of e = 1..6, descending parts
    std::vector<std::vector<uint32_t>> types;
    std::vector<uint32_t> cur;
    std::function<void(uint32_t, uint32_t)> gen = [&](uint32_t rest, uint32_t maxpart) {
        if (rest == 0) {
            types.push_back(cur);
            return;
        }
        for (uint32_t part = std::min(rest, maxpart); part >= 1; --part) {
            cur.push_back(part);
            gen(rest - part, part);
            cur.pop_back();
        }
    };
    for (uint32_t e = 1; e <= 6; ++e) gen(e, e);

    for (const auto& type : types) {
        bool all_ones = std::all_of(type.begin(), type.end(), [](uint32_t x) { return x == 1; });
        if (all_ones) {
            if (!scan_rank_one_type(p, uint32_t(type.size()), scanned, nondeg, fail)) {
                res.pass = false;
                res.detail = fail;
                return res;
            }
            continue;
        }
        // generic enumeration over the value grid
        const uint32_t r = uint32_t(type.size());
        FiniteModule N = make_finite_module(c, 0, type, Mat::identity(c, r));
        std::vector<std::pair<uint32_t, uint32_t>> slots;
        std::vector<uint32_t> caps;
        uint64_t total = 1;
        for (uint32_t i = 0; i < r; ++i)
            for (uint32_t j = i + 1; j < r; ++j) {
                slots.push_back({i, j});
                caps.push_back(std::min(type[i], type[j]));
                total *= pow_u64(p, caps.back());
            }
        uint32_t e_total = std::accumulate(type.begin(), type.end(), 0u);
        for (uint64_t code = 0; code < total; ++code) {
            uint64_t rest = code;
            std::vector<RationalModZ> vals(size_t(r) * r, RationalModZ{0, 0});
            for (uint32_t s = 0; s < slots.size(); ++s) {
                uint64_t cap = pow_u64(p, caps[s]);
                uint64_t v = rest % cap;
                rest /= cap;
                auto [i, j] = slots[s];
                vals[size_t(i) * r + j] = rational_mod_z(v, caps[s], p);
                vals[size_t(j) * r + i] = rational_mod_z(cap - v, caps[s], p);
            }
            FiniteForm form = make_finite_form(N, N, vals, true, true);
            ++scanned;
            NondegeneracyReport nd = nondegeneracy_finite(form);
            if (!nd.nondegenerate) continue;
            ++nondeg;
            if (e_total % 2 != 0) {
                res.pass = false;
                res.detail = "odd-exponent group carries a nondegenerate alternating form";
                return res;
            }
            SquareOrderResult so = alternating_square_order(form);
            if (so.refused || !so.even_exponent || !so.witness_checked) {
                res.pass = false;
                res.detail = "witness construction failed on a nondegenerate form";
                return res;
            }
        }
    }
    res.detail = std::to_string(scanned) + " forms scanned, " + std::to_string(nondeg) +
                 " nondegenerate, all with H x H^ witnesses";
    return res;
}

// --- criterion 6 ---------------------------------------------------------------

CriterionResult functional_equation_detector(uint64_t seed) {
    CriterionResult res{6, "Functional equation detector (symmetric vs asymmetric)", true, ""};
    RingContext c = RingContext::make(3, 8, 32);
    Series1 T = Series1::variable(c);
    // constructed symmetric corpus with known signs
    std::vector<std::pair<Series1, int>> sym = {
        {Series1::constant(c, 3), 1},
        {T, -1},
        {omega(c, 1), -1},
        {T * involution(T), 1},
    };
    for (const auto& [f, eps] : sym) {
        FunceqResult r = functional_equation_check(f);
        if (!r.holds || !r.epsilon || *r.epsilon != eps) {
            res.pass = false;
            res.detail = "symmetric series misjudged";
            return res;
        }
    }
    // multiplicativity over all pairs
    for (const auto& [f, ef] : sym)
        for (const auto& [g, eg] : sym) {
            FunceqResult r = functional_equation_check(f * g);
            if (!r.holds || !r.epsilon || *r.epsilon != ef * eg) {
                res.pass = false;
                res.detail = "epsilon fails multiplicativity";
                return res;
            }
        }
    // 20 seeded asymmetric series T - p*unit
    std::mt19937_64 rng(seed + 6);
    for (int t = 0; t < 20; ++t) {
        Series1 f = random_split_factor(c, rng);
        FunceqResult r = functional_equation_check(f);
        if (r.holds) {
            res.pass = false;
            res.detail = "asymmetric series passed at draw " + std::to_string(t);
            return res;
        }
    }
    res.detail = "4 symmetric + 16 products + 20 asymmetric series judged correctly";
    return res;
}

// --- criterion 7 ---------------------------------------------------------------

CriterionResult guo_lemma(uint64_t) {
    CriterionResult res{7, "Guo rank on constructed towers; parity on symplectic sums", true, ""};
    RingContext c = RingContext::make(3, 8, 32);
    auto trivial_module = [&](std::vector<uint32_t> orders) {
        Mat g = Mat::identity(c, uint32_t(orders.size()));
        return make_finite_module(c, 0, std::move(orders), g);
    };
    struct SystemSpec {
        ProjectiveSystem sys;
        uint32_t expected;
    };
    std::vector<SystemSpec> specs;
    auto build = [&](std::vector<std::vector<uint32_t>> profiles) {
        std::vector<FiniteModule> lv;
        std::vector<Mat> tr;
        for (auto& prof : profiles) {
            std::sort(prof.rbegin(), prof.rend());
            lv.push_back(trivial_module(prof));
        }
        for (uint32_t n = 0; n + 1 < lv.size(); ++n) {
            Mat t(c, lv[n].rank(), lv[n + 1].rank());
            for (uint32_t i = 0; i < lv[n].rank(); ++i) t.at(i, i) = 1;
            tr.push_back(t);
        }
        return make_projective_system(c, lv, tr);
    };
    // rank 0: constant systems
    specs.push_back({build({{1}, {1}, {1}, {1}, {1}}), 0});
    specs.push_back({build({{2, 1}, {2, 1}, {2, 1}, {2, 1}, {2, 1}}), 0});
    // rank 1: one growing factor
    specs.push_back({build({{1}, {2}, {3}, {4}, {5}}), 1});
    specs.push_back({build({{1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}}), 1});
    specs.push_back({build({{2}, {3}, {4}, {5}, {6}}), 1});
    // rank 2: two growing factors
    specs.push_back({build({{1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}}), 2});
    specs.push_back({build({{1, 1, 1}, {2, 2, 1}, {3, 3, 1}, {4, 4, 1}, {5, 5, 1}}), 2});
    specs.push_back({build({{2, 1}, {3, 2}, {4, 3}, {5, 4}, {6, 5}}), 2});
    // mixed bounded + growing
    specs.push_back({build({{1, 1}, {2, 1}, {3, 2}, {4, 2}, {5, 2}}), 1});
    specs.push_back({build({{3, 3}, {3, 3}, {3, 3}, {3, 3}, {3, 3}}), 0});
    int idx = 0;
    for (const auto& spec : specs) {
        RankEstimate est = guo_rank(spec.sys, 4);
        if (est.unbounded_count != spec.expected) {
            res.pass = false;
            res.detail = "system " + std::to_string(idx) + ": expected rank " +
                         std::to_string(spec.expected) + ", got " +
                         std::to_string(est.unbounded_count);
            return res;
        }
        ++idx;
    }
    // parity on symplectic tower sums
    auto symplectic_level = [&](const FiniteModule& N, uint32_t order) {
        uint64_t po = pow_u64(c.p, order);
        std::vector<RationalModZ> vals = {{0, 0}, rational_mod_z(1, order, c.p),
                                          rational_mod_z(po - 1, order, c.p), {0, 0}};
        return make_finite_form(N, N, vals, true, true);
    };
    for (uint32_t copies : {1u, 2u}) {
        std::vector<FiniteModule> lv;
        std::vector<Mat> tr;
        std::vector<FiniteForm> forms;
        for (uint32_t n = 0; n <= 4; ++n) {
            FiniteModule block = trivial_module({n + 1, n + 1});
            FiniteModule total = block;
            FiniteForm form = symplectic_level(block, n + 1);
            for (uint32_t ccopy = 1; ccopy < copies; ++ccopy) {
                total = direct_sum(total, block);
                form = direct_sum(form, symplectic_level(block, n + 1));
            }
            lv.push_back(total);
            forms.push_back(form);
        }
        for (uint32_t n = 0; n < 4; ++n) tr.push_back(Mat::identity(c, 2 * copies));
        ProjectiveSystem sys = make_projective_system(c, lv, tr);
        ParityReport rep = parity_check(sys, forms, 0, 4);
        if (!rep.pass || rep.even_rank != 2 * copies || rep.even_rank % 2 != 0) {
            res.pass = false;
            res.detail = "parity fails on the symplectic tower sum with " +
                         std::to_string(copies) + " copies";
            return res;
        }
    }
    res.detail = "10 systems matched their constructed ranks; parity passed on symplectic sums";
    return res;
}

// --- criterion 8 ---------------------------------------------------------------

CriterionResult lambda_congruence(uint64_t) {
    CriterionResult res{8, "Lambda congruence on the three two-variable examples", true, ""};
    RingContext c2 = RingContext::make(3, 8, 12, 2);
    struct Example {
        ElementaryModule2 M;
        std::vector<uint32_t> expected;
    };
    std::vector<Example> examples;
    examples.push_back({ElementaryModule2{c2, {Series2::variable(c2, 2)}}, {1, 3, 9}});
    examples.push_back({ElementaryModule2{c2, {Series2::constant(c2, 3)}}, {0, 0, 0}});
    examples.push_back(
        {ElementaryModule2{c2, {Series2::variable(c2, 1) - Series2::variable(c2, 2)}}, {1, 1, 1}});
    int idx = 0;
    for (const auto& ex : examples) {
        LambdaCongruenceReport rep = lambda_congruence_check(ex.M, 0, 2);
        if (!rep.all_determined || rep.lambdas != ex.expected || !rep.congruence_holds) {
            res.pass = false;
            res.detail = "example " + std::to_string(idx) + " disagrees with the closed form";
            return res;
        }
        ++idx;
    }
    res.detail = "lambda sequences (1,3,9), (0,0,0), (1,1,1); congruences mod 2 hold";
    return res;
}

// --- criterion 9 ---------------------------------------------------------------

CriterionResult growth_formula(uint64_t seed) {
    CriterionResult res{9, "Growth formula e_n = mu p^n + lambda n + nu on the corpus", true, ""};
    RingContext c = RingContext::make(3, 8, 32);
    auto corpus = seeded_elementary_corpus(c, seed);
    int idx = 0;
    for (const ElementaryModule& M : corpus) {
        GrowthFit fit = iwasawa_invariants_via_growth(ModuleInput{M}, 1, 3);
        auto [mu, lambda] = mu_lambda(char_series(ModuleInput{M}));
        bool ok = fit.exact && fit.mu == mu && fit.lambda == lambda;
        for (int64_t r : fit.residuals) ok = ok && r == 0;
        if (!ok) {
            res.pass = false;
            res.detail = "no single-nu exact fit at module " + std::to_string(idx);
            return res;
        }
        ++idx;
    }
    res.detail = "20 modules fit exactly for n in {1,2,3} with a single nu";
    return res;
}

// --- criterion 10 --------------------------------------------------------------

CriterionResult admissibility_searches(uint64_t) {
    CriterionResult res{10, "Admissible twist and line searches", true, ""};
    RingContext c = RingContext::make(3, 8, 32);
    Character chi = Character::make(c, 4);
    SearchResult tw = admissible_twist_search(Series1::variable(c), chi, 0, 4, 2);
    if (tw.exhausted() || *tw.value != 1) {
        res.pass = false;
        res.detail = "twist search did not return k = 1";
        return res;
    }
    RingContext c2 = RingContext::make(3, 8, 12, 2);
    Series2 F = Series2::variable(c2, 1) - Series2::variable(c2, 2);
    SearchResult ln = admissible_line_search(F, 1, 4, 2);
    if (ln.exhausted() || *ln.value != 2) {
        res.pass = false;
        res.detail = "line search did not return b = 2";
        return res;
    }
    res.detail = "twist search returned k = 1 (0 rejected); line search returned b = 2 (1 rejected)";
    return res;
}

}  // namespace

std::vector<CriterionResult> run_acceptance_suite(uint64_t seed) {
    struct Entry {
        CriterionResult (*run)(uint64_t);
        double budget_seconds;  // 0 = unstated
    };
    const Entry entries[] = {
        {weierstrass_reconstruction, 5.0}, {adjoint_cross_check, 30.0},
        {pseudo_null_annihilation, 0.0},   {order_identity, 0.0},
        {square_order_exhaustive, 60.0},   {functional_equation_detector, 0.0},
        {guo_lemma, 0.0},                  {lambda_congruence, 120.0},
        {growth_formula, 0.0},             {admissibility_searches, 0.0},
    };
    std::vector<CriterionResult> out;
    for (const Entry& e : entries) {
        auto t0 = std::chrono::steady_clock::now();
        CriterionResult r = e.run(seed);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", secs);
        r.detail += std::string(" [") + buf + " s]";
        if (e.budget_seconds > 0 && secs > e.budget_seconds) {
            r.pass = false;
            r.detail += " EXCEEDS the stated budget of " + std::to_string(int(e.budget_seconds)) +
                        " s";
        }
        out.push_back(std::move(r));
    }
    return out;
}

int print_acceptance_suite(std::ostream& os, uint64_t seed) {
    int failures = 0;
    for (const CriterionResult& r : run_acceptance_suite(seed)) {
        os << (r.pass ? "PASS" : "FAIL") << "  " << r.id << ". " << r.name;
        if (!r.detail.empty()) os << " -- " << r.detail;
        os << "\n";
        if (!r.pass) ++failures;
    }
    os << (failures == 0 ? "acceptance suite: all criteria passed"
                         : "acceptance suite: " + std::to_string(failures) + " criterion(s) failed")
       << "\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace iwa
