#include "iwa/descriptor.hpp"

#include <json.hpp>
#include <sstream>

#include "iwa/adjoint.hpp"

namespace iwa {

using nlohmann::json;

namespace {

uint64_t to_u64(const json& j, const char* what) {
    if (!j.is_number_unsigned() && !j.is_number_integer())
        throw input_error(std::string("expected an integer for ") + what);
    int64_t v = j.get<int64_t>();
    if (v < 0) throw input_error(std::string(what) + " must be non-negative");
    return uint64_t(v);
}

Series1 parse_series1(const RingContext& ctx, const json& j, const char* what) {
    if (!j.is_array()) throw input_error(std::string(what) + " must be a coefficient list");
    std::vector<uint64_t> coeffs;
    for (const auto& v : j) coeffs.push_back(to_u64(v, what));
    return Series1::from_coeffs(ctx, coeffs);
}

Series2 parse_series2(const RingContext& ctx, const json& j, const char* what) {
    if (!j.is_array()) throw input_error(std::string(what) + " must be an m x m grid");
    std::vector<std::vector<uint64_t>> rows;
    for (const auto& row : j) {
        if (!row.is_array()) throw input_error(std::string(what) + " rows must be lists");
        std::vector<uint64_t> r;
        for (const auto& v : row) r.push_back(to_u64(v, what));
        rows.push_back(std::move(r));
    }
    return Series2::from_grid(ctx, rows);
}

Mat parse_matrix(const RingContext& ctx, const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw input_error(std::string(what) + " must be a matrix");
    uint32_t rows = uint32_t(j.size());
    uint32_t cols = uint32_t(j[0].size());
    Mat m(ctx, rows, cols);
    for (uint32_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw input_error(std::string(what) + " must be rectangular");
        for (uint32_t k = 0; k < cols; ++k) m.at(i, k) = to_u64(j[i][k], what) % ctx.pa;
    }
    return m;
}

FiniteModule parse_finite_module(const RingContext& ctx, const json& j) {
    uint32_t level = uint32_t(to_u64(j.at("level"), "level"));
    std::vector<uint32_t> orders;
    for (const auto& v : j.at("orders")) orders.push_back(uint32_t(to_u64(v, "orders")));
    if (orders.empty()) return zero_finite_module(ctx, level);
    Mat action = j.contains("action") ? parse_matrix(ctx, j.at("action"), "action")
                                      : Mat::identity(ctx, uint32_t(orders.size()));
    return make_finite_module(ctx, level, std::move(orders), std::move(action));
}

RationalModZ parse_value(const RingContext& ctx, const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw input_error("form values are [numerator, denominator-exponent] pairs");
    return rational_mod_z(to_u64(j[0], "value"), uint32_t(to_u64(j[1], "value")), ctx.p);
}

FiniteForm parse_finite_form(const RingContext& ctx, const FiniteModule& left,
                             const FiniteModule& right, const json& j) {
    std::vector<RationalModZ> vals;
    const json& grid = j.at("values");
    for (const auto& row : grid)
        for (const auto& v : row) vals.push_back(parse_value(ctx, v));
    bool galois = j.value("galois", false);
    bool alternating = j.value("alternating", false);
    return make_finite_form(left, right, std::move(vals), galois, alternating);
}

const ElementaryModule& elementary_at(const Descriptor& d, uint32_t idx, const char* what) {
    if (idx >= d.modules.size()) throw input_error(std::string(what) + ": module index out of range");
    if (!std::holds_alternative<ElementaryModule>(d.modules[idx]))
        throw input_error(std::string(what) + ": expected an elementary module");
    return std::get<ElementaryModule>(d.modules[idx]);
}

const FiniteModule& finite_at(const Descriptor& d, uint32_t idx, const char* what) {
    if (idx >= d.modules.size()) throw input_error(std::string(what) + ": module index out of range");
    if (!std::holds_alternative<FiniteModule>(d.modules[idx]))
        throw input_error(std::string(what) + ": expected a finite-level module");
    return std::get<FiniteModule>(d.modules[idx]);
}

}  // namespace

namespace {
Descriptor parse_descriptor_impl(const std::string& json_text);
}

Descriptor parse_descriptor(const std::string& json_text) {
    try {
        return parse_descriptor_impl(json_text);
    } catch (const json::exception& e) {
        // missing fields, wrong types: report with the library's diagnostics
        throw input_error(std::string("descriptor schema error: ") + e.what());
    }
}

namespace {
Descriptor parse_descriptor_impl(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw input_error(std::string("descriptor is not valid JSON: ") + e.what());
    }
    Descriptor d;
    const json& ring = root.at("ring");
    uint32_t vars = uint32_t(ring.value("vars", 1));
    d.ring = RingContext::make(uint32_t(to_u64(ring.at("p"), "p")),
                               uint32_t(to_u64(ring.at("precision"), "precision")),
                               uint32_t(to_u64(ring.at("truncation"), "truncation")), vars);
    RingContext one_var =
        vars == 1 ? d.ring : RingContext::make(d.ring.p, d.ring.a, d.ring.m, 1);

    for (const json& jm : root.value("modules", json::array())) {
        std::string kind = jm.at("kind").get<std::string>();
        if (kind == "elementary") {
            if (vars == 2) {
                ElementaryModule2 M{d.ring, {}};
                for (const auto& f : jm.at("factors"))
                    M.factors.push_back(parse_series2(d.ring, f, "factors"));
                d.modules2.push_back(std::move(M));
            } else {
                ElementaryModule M{one_var, {}};
                for (const auto& f : jm.at("factors"))
                    M.factors.push_back(parse_series1(one_var, f, "factors"));
                d.modules.push_back(std::move(M));
            }
        } else if (kind == "square") {
            const json& rows = jm.at("matrix");
            uint32_t dim = uint32_t(rows.size());
            std::vector<Series1> entries;
            for (const auto& row : rows) {
                if (row.size() != dim) throw input_error("square matrix must be square");
                for (const auto& e : row) entries.push_back(parse_series1(one_var, e, "matrix"));
            }
            d.modules.push_back(make_square_module(one_var, dim, std::move(entries)));
        } else if (kind == "finite") {
            d.modules.push_back(parse_finite_module(one_var, jm));
        } else {
            throw input_error("unknown module kind '" + kind + "'");
        }
    }

    for (const json& jf : root.value("forms", json::array())) {
        std::string kind = jf.at("kind").get<std::string>();
        uint32_t left = uint32_t(to_u64(jf.at("left"), "left"));
        uint32_t right = uint32_t(to_u64(jf.at("right"), "right"));
        if (kind == "sesqui") {
            const ElementaryModule& L = elementary_at(d, left, "sesqui form");
            const ElementaryModule& R = elementary_at(d, right, "sesqui form");
            std::vector<FracClass> entries;
            for (const auto& row : jf.at("entries"))
                for (const auto& e : row)
                    entries.push_back(make_frac_class(parse_series1(one_var, e.at("num"), "num"),
                                                      parse_series1(one_var, e.at("den"), "den")));
            d.sesqui_forms.push_back({left, right, make_sesqui_form(L, R, std::move(entries))});
        } else if (kind == "finite") {
            const FiniteModule& L = finite_at(d, left, "finite form");
            const FiniteModule& R = finite_at(d, right, "finite form");
            d.finite_forms.push_back({parse_finite_form(one_var, L, R, jf)});
        } else {
            throw input_error("unknown form kind '" + kind + "'");
        }
    }

    for (const json& js : root.value("systems", json::array())) {
        std::vector<FiniteModule> levels;
        for (const auto& jl : js.at("levels")) levels.push_back(parse_finite_module(one_var, jl));
        std::vector<Mat> transitions;
        for (const auto& jt : js.value("transitions", json::array()))
            transitions.push_back(parse_matrix(one_var, jt, "transitions"));
        Descriptor::SystemPayload payload{
            make_projective_system(one_var, levels, std::move(transitions)), {}, 0};
        if (js.contains("forms")) {
            uint32_t idx = 0;
            for (const auto& jf : js.at("forms")) {
                if (idx >= payload.system.levels.size())
                    throw input_error("more per-level forms than levels");
                const FiniteModule& N = payload.system.levels[idx];
                payload.forms.push_back(parse_finite_form(one_var, N, N, jf));
                ++idx;
            }
        }
        payload.kernel_bound = uint32_t(js.value("kernel_bound", 0));
        d.systems.push_back(std::move(payload));
    }
    return d;
}
}  // namespace

// --- report machinery -----------------------------------------------------------

namespace {

struct Report {
    std::ostringstream text;
    std::ostringstream summary;
    int verdicts_pass = 0;
    int verdicts_fail = 0;

    void verdict(bool ok) { ok ? ++verdicts_pass : ++verdicts_fail; }
};

std::string orders_str(const std::vector<uint32_t>& orders) {
    std::string s = "[";
    for (size_t i = 0; i < orders.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(orders[i]);
    }
    return s + "]";
}

std::string ring_str(const RingContext& c) {
    return "p:" + std::to_string(c.p) + ",a:" + std::to_string(c.a) + ",m:" + std::to_string(c.m) +
           ",vars:" + std::to_string(c.vars);
}

void cmd_prepare(const Descriptor& d, const RunOptions&, Report& rep) {
    uint32_t mi = 0;
    for (const ModuleInput& M : d.modules) {
        if (std::holds_alternative<ElementaryModule>(M)) {
            const auto& E = std::get<ElementaryModule>(M);
            for (uint32_t f = 0; f < E.factors.size(); ++f) {
                WeierstrassData w = weierstrass_prepare(E.factors[f]);
                bool ok = weierstrass_reconstruct(w, E.ctx) == E.factors[f];
                rep.text << "module " << mi << " factor " << f << ": mu=" << w.mu
                         << " lambda=" << w.lambda << " reconstruction "
                         << (ok ? "exact" : "FAILED") << "\n";
                rep.summary << "item=module:" << mi << ",factor:" << f << " mu=" << w.mu
                            << " lambda=" << w.lambda << " ok=" << (ok ? 1 : 0) << "\n";
                rep.verdict(ok);
            }
        } else if (std::holds_alternative<SquareModule>(M)) {
            Series1 cs = char_series(M);
            auto [mu, lambda] = mu_lambda(cs);
            rep.text << "module " << mi << " (square): char series mu=" << mu
                     << " lambda=" << lambda << "\n";
            rep.summary << "item=module:" << mi << " mu=" << mu << " lambda=" << lambda
                        << " ok=1\n";
            rep.verdict(true);
        } else {
            rep.text << "module " << mi << " (finite): nothing to prepare\n";
        }
        ++mi;
    }
}

void cmd_coinv(const Descriptor& d, const RunOptions& opts, Report& rep) {
    uint32_t mi = 0;
    for (const ModuleInput& M : d.modules) {
        for (uint32_t n = 0; n <= opts.levels; ++n) {
            LevelQuotient q = coinvariants_at_level(M, n);
            rep.text << "module " << mi << " level " << n << ": "
                     << (q.finite ? "finite" : "infinite at precision") << ", orders "
                     << orders_str(q.mod.orders) << " (exponent " << q.mod.order_exponent()
                     << ")\n";
            rep.summary << "item=module:" << mi << ",level:" << n
                        << " finite=" << (q.finite ? 1 : 0) << " orders=" << orders_str(q.mod.orders)
                        << "\n";
        }
        ++mi;
    }
}

void cmd_adjoint(const Descriptor& d, const RunOptions& opts, Report& rep) {
    uint32_t mi = 0;
    for (const ModuleInput& M : d.modules) {
        AdjointTower tower = adjoint_via_limit(M, opts.levels);
        for (uint32_t n = 0; n <= opts.levels; ++n) {
            rep.text << "module " << mi << " level " << n << ": adjoint order exponent "
                     << tower.exponents[n] << ", stable image exponent "
                     << tower.stable_image_exponents[n] << "\n";
        }
        std::string fitstr = "unfitted";
        if (tower.fit)
            fitstr = "mu:" + std::to_string(tower.fit->mu) +
                     ",lambda:" + std::to_string(tower.fit->lambda) +
                     ",nu:" + std::to_string(tower.fit->nu);
        rep.text << "module " << mi << ": fit " << fitstr << ", stabilized "
                 << (tower.stabilized ? "yes" : "no") << "\n";
        std::string cross = "n/a";
        if (std::holds_alternative<ElementaryModule>(M)) {
            bool cross_ok = true;
            ElementaryModule closed =
                adjoint_elementary(std::get<ElementaryModule>(M), /*dotted=*/true);
            for (uint32_t n = 0; n <= opts.levels; ++n) {
                LevelQuotient q = coinvariants_at_level(ModuleInput{closed}, n);
                if (!q.finite || q.mod.order_exponent() != tower.exponents[n]) cross_ok = false;
            }
            rep.text << "module " << mi << ": closed-form cross-check "
                     << (cross_ok ? "agrees" : "DISAGREES") << "\n";
            rep.verdict(cross_ok);
            cross = cross_ok ? "1" : "0";
        }
        rep.summary << "item=module:" << mi << " exponents=";
        for (uint32_t n = 0; n <= opts.levels; ++n)
            rep.summary << tower.exponents[n] << (n < opts.levels ? "," : "");
        rep.summary << " fit=" << fitstr << " cross=" << cross << "\n";
        ++mi;
    }
}

void cmd_pair(const Descriptor& d, const RunOptions& opts, Report& rep) {
    uint32_t fi = 0;
    for (const auto& payload : d.sesqui_forms) {
        AxiomFlags flags;
        flags.sesquilinear = true;
        AxiomReport ax = check_axioms(payload.form, flags);
        rep.text << "sesqui form " << fi << ": sesquilinearity "
                 << (ax.all_pass ? "holds" : "violated") << "\n";
        rep.verdict(ax.all_pass);
        NondegeneracyReport nd = nondegeneracy_test(payload.form, opts.levels);
        rep.text << "sesqui form " << fi << " at level " << opts.levels << ": "
                 << (nd.pole ? "pole along the level ideal"
                             : (nd.nondegenerate ? "nondegenerate" : "degenerate"))
                 << ", kernel " << orders_str(nd.kernel_orders) << ", cokernel "
                 << orders_str(nd.cokernel_orders) << "\n";
        rep.summary << "item=sesqui:" << fi << " sesquilinear=" << (ax.all_pass ? 1 : 0)
                    << " pole=" << (nd.pole ? 1 : 0)
                    << " nondegenerate=" << (nd.nondegenerate ? 1 : 0)
                    << " kernel=" << orders_str(nd.kernel_orders) << "\n";
        ++fi;
    }
    fi = 0;
    for (const auto& payload : d.finite_forms) {
        const FiniteForm& form = payload.form;
        AxiomFlags flags;
        flags.galois = form.galois_compatible;
        flags.alternating = form.alternating;
        AxiomReport ax = check_axioms_finite(form, flags);
        rep.text << "finite form " << fi << ": claimed axioms "
                 << (ax.all_pass ? "verified" : "violated") << "\n";
        rep.verdict(ax.all_pass);
        std::string square = "n/a";
        if (form.alternating && ax.all_pass) {
            SquareOrderResult so = alternating_square_order(form);
            if (so.refused) {
                square = "refused(" + so.reason + ")";
                rep.verdict(false);
            } else {
                square = so.even_exponent && so.witness_checked ? "even-exponent-with-witness"
                                                                : "FAILED";
                rep.verdict(so.even_exponent && so.witness_checked);
            }
            rep.text << "finite form " << fi << ": square-order " << square << "\n";
        }
        rep.summary << "item=finite:" << fi << " axioms=" << (ax.all_pass ? 1 : 0)
                    << " square=" << square << "\n";
        ++fi;
    }
}

void cmd_funceq(const Descriptor& d, const RunOptions&, Report& rep) {
    uint32_t mi = 0;
    for (const ModuleInput& M : d.modules) {
        if (std::holds_alternative<FiniteModule>(M)) {
            ++mi;
            continue;
        }
        Series1 cs = char_series(M);
        FunceqResult r = functional_equation_check(cs);
        std::string eps = r.epsilon ? std::to_string(*r.epsilon) : "none";
        rep.text << "module " << mi << ": functional equation "
                 << (r.holds ? "holds" : "fails") << ", epsilon " << eps << "\n";
        rep.summary << "item=module:" << mi << " holds=" << (r.holds ? 1 : 0) << " epsilon=" << eps
                    << "\n";
        rep.verdict(r.holds);
        ++mi;
    }
    uint32_t m2 = 0;
    for (const ElementaryModule2& M : d.modules2) {
        Series2 prod = Series2::constant(M.ctx, 1);
        for (const Series2& f : M.factors) prod = prod * f;
        FunceqResult r = functional_equation_check(prod);
        std::string eps = r.epsilon ? std::to_string(*r.epsilon) : "none";
        rep.text << "two-variable module " << m2 << ": functional equation "
                 << (r.holds ? "holds" : "fails") << ", epsilon " << eps << "\n";
        rep.summary << "item=module2:" << m2 << " holds=" << (r.holds ? 1 : 0) << " epsilon=" << eps
                    << "\n";
        rep.verdict(r.holds);
        ++m2;
    }
}

void cmd_parity(const Descriptor& d, const RunOptions& opts, Report& rep) {
    uint32_t si = 0;
    for (const auto& payload : d.systems) {
        uint32_t horizon = std::min<uint32_t>(opts.levels, uint32_t(payload.system.levels.size()) - 1);
        RankEstimate est = guo_rank(payload.system, horizon);
        rep.text << "system " << si << ": profile at horizon "
                 << orders_str(divisor_profile(payload.system, horizon)) << ", unbounded count "
                 << est.unbounded_count << " (" << est.confidence << ")\n";
        rep.summary << "item=system:" << si << " rank=" << est.unbounded_count
                    << " d=" << est.d << "\n";
        if (!payload.forms.empty()) {
            ParityReport pr = parity_check(payload.system, payload.forms, payload.kernel_bound,
                                           horizon);
            rep.text << "system " << si << ": parity "
                     << (pr.pass ? "pass, even rank " + std::to_string(pr.even_rank)
                                 : "fail: " + pr.failure)
                     << "\n";
            rep.summary << "item=system-parity:" << si << " pass=" << (pr.pass ? 1 : 0)
                        << " even_rank=" << pr.even_rank << "\n";
            rep.verdict(pr.pass);
        }
        ++si;
    }
    uint32_t mi = 0;
    for (const ElementaryModule2& M : d.modules2) {
        uint32_t hi = std::min<uint32_t>(opts.levels, 2);
        LambdaCongruenceReport lr = lambda_congruence_check(M, 0, hi);
        rep.text << "two-variable module " << mi << ": lambda sequence ";
        for (size_t i = 0; i < lr.lambdas.size(); ++i)
            rep.text << (i ? "," : "") << lr.lambdas[i];
        rep.text << ", congruence mod " << (d.ring.p - 1) << " "
                 << (lr.congruence_holds ? "holds" : "fails")
                 << (lr.all_determined ? "" : " (undetermined levels present)") << "\n";
        rep.summary << "item=module2:" << mi << " lambdas=";
        for (size_t i = 0; i < lr.lambdas.size(); ++i)
            rep.summary << (i ? "," : "") << lr.lambdas[i];
        rep.summary << " congruence=" << (lr.congruence_holds ? 1 : 0) << "\n";
        rep.verdict(lr.congruence_holds && lr.all_determined);
        ++mi;
    }
}

}  // namespace

RunResult run_command(const std::string& command, const std::string& descriptor_json,
                      const RunOptions& opts) {
    RunResult out;
    Report rep;
    try {
        std::string effective = descriptor_json;
        if (opts.precision || opts.truncation) {
            json root;
            try {
                root = json::parse(descriptor_json);
            } catch (const json::parse_error& e) {
                throw input_error(std::string("descriptor is not valid JSON: ") + e.what());
            }
            if (opts.precision) root["ring"]["precision"] = *opts.precision;
            if (opts.truncation) root["ring"]["truncation"] = *opts.truncation;
            effective = root.dump();
        }
        Descriptor d = parse_descriptor(effective);

        rep.text << "command: " << command << "\n";
        rep.text << "ring: " << ring_str(d.ring) << "\n";

        if (command == "prepare")
            cmd_prepare(d, opts, rep);
        else if (command == "coinv")
            cmd_coinv(d, opts, rep);
        else if (command == "adjoint")
            cmd_adjoint(d, opts, rep);
        else if (command == "pair")
            cmd_pair(d, opts, rep);
        else if (command == "funceq")
            cmd_funceq(d, opts, rep);
        else if (command == "parity")
            cmd_parity(d, opts, rep);
        else
            throw input_error("unknown command '" + command + "'");

        out.exit_code = rep.verdicts_fail > 0 ? 1 : 0;
        std::ostringstream sum;
        sum << "== summary ==\n";
        sum << "command=" << command << "\n";
        sum << "ring=" << ring_str(d.ring) << "\n";
        sum << "levels=" << opts.levels << "\n";
        sum << rep.summary.str();
        sum << "verdicts=pass:" << rep.verdicts_pass << ",fail:" << rep.verdicts_fail << "\n";
        sum << "exit=" << out.exit_code << "\n";
        out.summary = sum.str();
        out.text = rep.text.str();
    } catch (const input_error& e) {
        out.exit_code = 2;
        out.text = std::string("input error: ") + e.what() + "\n";
        out.summary = "== summary ==\ncommand=" + command + "\nerror=input\nexit=2\n";
    } catch (const error& e) {
        out.exit_code = 2;
        out.text = std::string("error: ") + e.what() + "\n";
        out.summary = "== summary ==\ncommand=" + command + "\nerror=computation\nexit=2\n";
    }
    return out;
}

}  // namespace iwa
