#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "iwa/parity.hpp"

using namespace iwa;

namespace {

RingContext ctx() { return RingContext::make(3, 8, 32); }

FiniteModule trivial_module(const RingContext& c, std::vector<uint32_t> orders) {
    Mat g = Mat::identity(c, uint32_t(orders.size()));
    return make_finite_module(c, 0, std::move(orders), g);
}

// Tower Z/p^{n+1} with reduction transitions, plus a fixed extra summand on
// request.  Levels 0..depth.
ProjectiveSystem cyclic_growth_system(const RingContext& c, uint32_t depth,
                                      std::vector<uint32_t> extra = {}) {
    std::vector<FiniteModule> levels;
    std::vector<Mat> transitions;
    for (uint32_t n = 0; n <= depth; ++n) {
        std::vector<uint32_t> orders = {n + 1};
        for (uint32_t e : extra) orders.push_back(e);
        std::sort(orders.rbegin(), orders.rend());
        levels.push_back(trivial_module(c, orders));
    }
    for (uint32_t n = 0; n < depth; ++n) {
        uint32_t r = levels[n].rank();
        Mat t = Mat::identity(c, r);
        transitions.push_back(t);
    }
    return make_projective_system(c, std::move(levels), std::move(transitions));
}

// Brute-force invariant factors: count element orders by repeated addition.
std::vector<uint32_t> brute_force_profile(const FiniteModule& N) {
    const RingContext& c = N.ctx;
    if (N.is_zero()) return {};
    // enumerate all elements
    std::vector<uint64_t> moduli;
    for (uint32_t e : N.orders) moduli.push_back(modarith::pow_u64(c.p, e));
    uint64_t total = 1;
    for (uint64_t m : moduli) total *= m;
    std::map<uint32_t, uint64_t> order_counts;  // exponent t -> #elements of order p^t
    for (uint64_t idx = 0; idx < total; ++idx) {
        std::vector<uint64_t> x;
        uint64_t rest = idx;
        for (uint64_t m : moduli) {
            x.push_back(rest % m);
            rest /= m;
        }
        // order of x by repeated addition
        std::vector<uint64_t> acc(x.size(), 0);
        uint32_t t = 0;
        bool zero = std::all_of(x.begin(), x.end(), [](uint64_t v) { return v == 0; });
        std::vector<uint64_t> cur = x;
        while (!zero) {
            ++t;
            for (size_t i = 0; i < cur.size(); ++i) cur[i] = cur[i] * c.p % moduli[i];
            zero = std::all_of(cur.begin(), cur.end(), [](uint64_t v) { return v == 0; });
        }
        (void)acc;
        order_counts[t] += 1;
    }
    // d_k = #{j : r_j >= k} recovered from the counts of order <= p^k
    std::vector<uint32_t> profile;
    uint64_t below = 1;
    uint32_t maxt = order_counts.rbegin()->first;
    std::vector<uint64_t> cum(maxt + 1, 0);
    uint64_t run = 0;
    for (uint32_t t = 0; t <= maxt; ++t) {
        run += order_counts.count(t) ? order_counts[t] : 0;
        cum[t] = run;
    }
    (void)below;
    std::vector<uint32_t> dk;
    for (uint32_t k = 1; k <= maxt; ++k) {
        uint64_t ratio = cum[k] / cum[k - 1];
        uint32_t d = 0;
        while (ratio > 1) {
            ratio /= c.p;
            ++d;
        }
        dk.push_back(d);
    }
    // conjugate partition
    for (uint32_t j = 0; j < (dk.empty() ? 0 : dk[0]); ++j) {
        uint32_t r = 0;
        for (uint32_t k = 0; k < dk.size(); ++k)
            if (dk[k] > j) r = k + 1;
        profile.push_back(r);
    }
    std::sort(profile.rbegin(), profile.rend());
    return profile;
}

FiniteForm symplectic_level(const FiniteModule& N, uint32_t order) {
    const RingContext& c = N.ctx;
    uint64_t po = modarith::pow_u64(c.p, order);
    std::vector<RationalModZ> vals = {
        {0, 0}, rational_mod_z(1, order, c.p), rational_mod_z(po - 1, order, c.p), {0, 0}};
    return make_finite_form(N, N, vals, true, true);
}

}  // namespace

TEST_CASE("divisor profiles") {
    RingContext c = ctx();
    SUBCASE("orders read off, padded") {
        ProjectiveSystem sys = cyclic_growth_system(c, 3, {1});
        auto prof = divisor_profile(sys, 2);
        CHECK(prof == std::vector<uint32_t>{3, 1});
        auto prof0 = divisor_profile(sys, 0);
        CHECK(prof0 == std::vector<uint32_t>{1, 1});
    }
    SUBCASE("zero module has an empty profile") {
        std::vector<FiniteModule> lv = {zero_finite_module(c, 0)};
        ProjectiveSystem sys = make_projective_system(c, lv, {});
        CHECK(divisor_profile(sys, 0).empty());
    }
    SUBCASE("profile equals the brute-force decomposition") {
        std::mt19937_64 rng(5);
        for (int t = 0; t < 8; ++t) {
            // random module of order <= p^5 with scrambled presentation
            std::vector<uint32_t> orders;
            uint32_t budget = 5;
            while (budget > 0) {
                uint32_t e = 1 + uint32_t(rng() % std::min(budget, 3u));
                orders.push_back(e);
                budget -= e;
                if (rng() % 3 == 0) break;
            }
            std::sort(orders.rbegin(), orders.rend());
            FiniteModule N = trivial_module(c, orders);
            CHECK(brute_force_profile(N) == N.orders);
        }
    }
}

TEST_CASE("transition validation") {
    RingContext c = ctx();
    SUBCASE("non-surjective transitions are detected") {
        std::vector<FiniteModule> lv = {trivial_module(c, {1}), trivial_module(c, {1})};
        Mat t(c, 1, 1);
        t.at(0, 0) = 3;  // multiplication by p: zero map on Z/p
        ProjectiveSystem sys = make_projective_system(c, lv, {t});
        CHECK_FALSE(transition_surjective(sys, 0));
        CHECK_THROWS_AS(guo_rank(sys, 1), input_error);
    }
    SUBCASE("profiles never shrink under surjective transitions") {
        ProjectiveSystem sys = cyclic_growth_system(c, 4, {2, 1});
        for (uint32_t n = 0; n < 4; ++n) {
            auto a = divisor_profile(sys, n);
            auto b = divisor_profile(sys, n + 1);
            for (size_t j = 0; j < a.size(); ++j) CHECK(b[j] >= a[j]);
        }
    }
}

TEST_CASE("guo rank estimates") {
    RingContext c = ctx();
    SUBCASE("constant system has rank 0") {
        std::vector<FiniteModule> lv;
        std::vector<Mat> tr;
        for (int n = 0; n <= 4; ++n) lv.push_back(trivial_module(c, {1}));
        for (int n = 0; n < 4; ++n) tr.push_back(Mat::identity(c, 1));
        ProjectiveSystem sys = make_projective_system(c, lv, tr);
        RankEstimate est = guo_rank(sys, 4);
        CHECK(est.unbounded_count == 0);
    }
    SUBCASE("growing cyclic tower has rank 1") {
        ProjectiveSystem sys = cyclic_growth_system(c, 4);
        RankEstimate est = guo_rank(sys, 4);
        CHECK(est.unbounded_count == 1);
        CHECK(est.d == 1);
    }
    SUBCASE("mixed tower has rank 1") {
        ProjectiveSystem sys = cyclic_growth_system(c, 4, {1});
        RankEstimate est = guo_rank(sys, 4);
        CHECK(est.unbounded_count == 1);
        CHECK(est.d == 2);
    }
    SUBCASE("estimates never decrease as the horizon grows") {
        ProjectiveSystem sys = cyclic_growth_system(c, 4, {2});
        uint32_t prev = 0;
        for (uint32_t h = 1; h <= 4; ++h) {
            RankEstimate est = guo_rank(sys, h);
            CHECK(est.unbounded_count >= prev);
            prev = est.unbounded_count;
        }
        CHECK(prev == 1);
    }
    SUBCASE("tower from the Lambda/(T-p) coinvariants has rank 1") {
        ElementaryModule M{c, {Series1::from_coeffs(c, {c.pa - 3, 1})}};
        std::vector<FiniteModule> lv;
        std::vector<Mat> tr;
        for (uint32_t n = 0; n <= 3; ++n) {
            LevelQuotient q = coinvariants_at_level(ModuleInput{M}, n);
            lv.push_back(q.mod);
        }
        for (uint32_t n = 0; n < 3; ++n) tr.push_back(Mat::identity(c, 1));
        ProjectiveSystem sys = make_projective_system(c, lv, tr);
        // at horizon 3 the top order is 4 = a/2, just below the threshold;
        // the estimate is conservative there
        RankEstimate est3 = guo_rank(sys, 3);
        CHECK(est3.unbounded_count == 0);
        // deepen the tower so the profile clears the threshold
        RingContext big = RingContext::make(3, 8, 96);
        ElementaryModule Mb{big, {Series1::from_coeffs(big, {big.pa - 3, 1})}};
        std::vector<FiniteModule> lvb;
        std::vector<Mat> trb;
        for (uint32_t n = 0; n <= 4; ++n)
            lvb.push_back(coinvariants_at_level(ModuleInput{Mb}, n).mod);
        for (uint32_t n = 0; n < 4; ++n) trb.push_back(Mat::identity(big, 1));
        ProjectiveSystem sysb = make_projective_system(big, lvb, trb);
        RankEstimate est = guo_rank(sysb, 4);
        CHECK(est.unbounded_count == 1);
    }
}

TEST_CASE("parity check") {
    RingContext c = ctx();
    SUBCASE("symplectic towers pass with even rank") {
        std::vector<FiniteModule> lv;
        std::vector<Mat> tr;
        std::vector<FiniteForm> forms;
        for (uint32_t n = 0; n <= 4; ++n) {
            FiniteModule N = trivial_module(c, {n + 1, n + 1});
            forms.push_back(symplectic_level(N, n + 1));
            lv.push_back(std::move(N));
        }
        for (uint32_t n = 0; n < 4; ++n) tr.push_back(Mat::identity(c, 2));
        ProjectiveSystem sys = make_projective_system(c, lv, tr);
        ParityReport rep = parity_check(sys, forms, 0, 4);
        CHECK(rep.pass);
        CHECK(rep.even_rank == 2);
    }
    SUBCASE("block sums of symplectic towers add their ranks") {
        std::vector<FiniteModule> lv;
        std::vector<Mat> tr;
        std::vector<FiniteForm> forms;
        for (uint32_t n = 0; n <= 4; ++n) {
            FiniteModule N1 = trivial_module(c, {n + 1, n + 1});
            FiniteModule N2 = trivial_module(c, {n + 1, n + 1});
            forms.push_back(direct_sum(symplectic_level(N1, n + 1), symplectic_level(N2, n + 1)));
            lv.push_back(direct_sum(N1, N2));
        }
        for (uint32_t n = 0; n < 4; ++n) tr.push_back(Mat::identity(c, 4));
        ProjectiveSystem sys = make_projective_system(c, lv, tr);
        ParityReport rep = parity_check(sys, forms, 0, 4);
        CHECK(rep.pass);
        CHECK(rep.even_rank == 4);
    }
    SUBCASE("an odd cyclic tower only carries degenerate alternating forms") {
        ProjectiveSystem sys = cyclic_growth_system(c, 3);
        std::vector<FiniteForm> forms;
        for (uint32_t n = 0; n <= 3; ++n) {
            // the zero form is the only alternating form on a cyclic group
            forms.push_back(make_finite_form(sys.levels[n], sys.levels[n],
                                             {RationalModZ{0, 0}}, true, true));
        }
        ParityReport rep = parity_check(sys, forms, 0, 3);
        CHECK_FALSE(rep.pass);
        CHECK(rep.failure.find("kernel") != std::string::npos);
    }
    SUBCASE("declared kernel bounds are honored") {
        // symplectic plane plus a Z/p direct summand paired to zero: kernel
        // of exponent 1, accepted once declared
        std::vector<FiniteModule> lv;
        std::vector<Mat> tr;
        std::vector<FiniteForm> forms;
        for (uint32_t n = 0; n <= 3; ++n) {
            FiniteModule plane = trivial_module(c, {n + 1, n + 1});
            FiniteModule junk = trivial_module(c, {1});
            FiniteForm zero_junk = make_finite_form(junk, junk, {RationalModZ{0, 0}}, true, true);
            forms.push_back(direct_sum(symplectic_level(plane, n + 1), zero_junk));
            lv.push_back(direct_sum(plane, junk));
        }
        for (uint32_t n = 0; n < 3; ++n) tr.push_back(Mat::identity(c, 3));
        ProjectiveSystem sys = make_projective_system(c, lv, tr);
        ParityReport strict = parity_check(sys, forms, 0, 3);
        CHECK_FALSE(strict.pass);
        ParityReport relaxed = parity_check(sys, forms, 1, 3);
        CHECK(relaxed.pass);
    }
}

TEST_CASE("lambda congruence for two-variable modules") {
    RingContext c2 = RingContext::make(3, 8, 12, 2);
    SUBCASE("Lambda2/(T2): lambda_n = p^n") {
        ElementaryModule2 M{c2, {Series2::variable(c2, 2)}};
        LambdaCongruenceReport rep = lambda_congruence_check(M, 0, 2);
        CHECK(rep.lambdas == std::vector<uint32_t>{1, 3, 9});
        CHECK(rep.all_determined);
        CHECK(rep.congruence_holds);
    }
    SUBCASE("Lambda2/(p): lambda_n = 0") {
        ElementaryModule2 M{c2, {Series2::constant(c2, 3)}};
        LambdaCongruenceReport rep = lambda_congruence_check(M, 0, 2);
        CHECK(rep.lambdas == std::vector<uint32_t>{0, 0, 0});
        CHECK(rep.all_determined);
        CHECK(rep.congruence_holds);
    }
    SUBCASE("the antidiagonal line: lambda_n = 1") {
        Series2 F = Series2::variable(c2, 1) - Series2::variable(c2, 2);
        ElementaryModule2 M{c2, {F}};
        LambdaCongruenceReport rep = lambda_congruence_check(M, 0, 2);
        CHECK(rep.lambdas == std::vector<uint32_t>{1, 1, 1});
        CHECK(rep.all_determined);
        CHECK(rep.congruence_holds);
    }
    SUBCASE("graph-like factors give stationary lambda") {
        // (1+T1) - (1+T2)^2 and a p-killed factor
        Series2 one = Series2::constant(c2, 1);
        Series2 g = (one + Series2::variable(c2, 1)) -
                    (one + Series2::variable(c2, 2)) * (one + Series2::variable(c2, 2));
        ElementaryModule2 M{c2, {g, Series2::constant(c2, 3)}};
        LambdaCongruenceReport rep = lambda_congruence_check(M, 0, 2);
        CHECK(rep.all_determined);
        CHECK(rep.lambdas == std::vector<uint32_t>{1, 1, 1});
        CHECK(rep.congruence_holds);
    }
}
