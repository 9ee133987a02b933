#pragma once

#include <string>

#include "iwa/modules.hpp"

namespace iwa {

/// Class of g/f in Frac Lambda / Lambda, with f canonicalized to
/// p^mu * distinguished and g replaced by the canonical coset representative
/// (remainder mod distinguished plus the mod-p^mu part of the quotient).
struct FracClass {
    Series1 num;
    Series1 den;  // canonical p^mu * P
    uint32_t den_mu = 0;
    uint32_t den_lambda = 0;

    bool is_integral() const { return num.is_zero(); }
};

FracClass make_frac_class(const Series1& num, const Series1& den);
FracClass frac_scale(const FracClass& c, const Series1& g);  // class of g * c
FracClass frac_add(const FracClass& x, const FracClass& y);
FracClass frac_involute(const FracClass& c);
bool frac_equal(const FracClass& x, const FracClass& y);

/// Sesquilinear pairing M x M' -> Frac Lambda / Lambda on elementary modules:
/// entry (i,j) pairs generator i of M with generator j of M';
/// Theta(lambda x, y) = lambda Theta(x, y), Theta(x, lambda y) = iota(lambda) Theta(x, y).
struct SesquiForm {
    ElementaryModule left, right;
    std::vector<FracClass> entries;  // row-major, left.rank x right.rank

    const FracClass& at(uint32_t i, uint32_t j) const {
        return entries[size_t(i) * right.factors.size() + j];
    }
};

SesquiForm make_sesqui_form(ElementaryModule left, ElementaryModule right,
                            std::vector<FracClass> entries);
SesquiForm twist_form(const SesquiForm& theta, const Character& chi, int64_t k);
// Transposed-involuted partner: the form the swap symmetry is tested against.
SesquiForm swap_partner(const SesquiForm& theta);

/// Value in (1/p^k) Z / Z, reduced (num < p^k, p does not divide num unless 0).
struct RationalModZ {
    uint64_t num = 0;
    uint32_t den_exp = 0;

    bool is_zero() const { return den_exp == 0; }
};

RationalModZ rational_mod_z(uint64_t num, uint32_t den_exp, uint32_t p);
RationalModZ rational_add(const RationalModZ& x, const RationalModZ& y, uint32_t p);
RationalModZ rational_scale(const RationalModZ& x, uint64_t c, uint32_t p);
bool rational_eq(const RationalModZ& x, const RationalModZ& y);

/// Bilinear Q_p/Z_p-valued pairing of two finite-level modules, by values on
/// the cyclic generators.
struct FiniteForm {
    FiniteModule left, right;
    std::vector<RationalModZ> values;  // row-major
    bool galois_compatible = false;    // claimed: form(gx, gy) = form(x, y)
    bool alternating = false;          // claimed: form(x, x) = 0

    const RationalModZ& at(uint32_t i, uint32_t j) const {
        return values[size_t(i) * right.orders.size() + j];
    }
};

FiniteForm make_finite_form(FiniteModule left, FiniteModule right,
                            std::vector<RationalModZ> values, bool galois, bool alternating);

RationalModZ finite_form_value(const FiniteForm& f, const std::vector<uint64_t>& x,
                               const std::vector<uint64_t>& y);
FiniteForm direct_sum(const FiniteForm& a, const FiniteForm& b);

// --- specializations ----------------------------------------------------------

struct TorsionSpecialization {
    FiniteForm form;
    LevelQuotient left_coords, right_coords;
};

// t-specialization at level n.  Demands finite coinvariants on both sides and
// denominators without a pole along omega_n.
TorsionSpecialization specialize_torsion(const SesquiForm& theta, uint32_t n);

// Value between ambient representatives (functoriality checks).
RationalModZ torsion_value_ambient(const SesquiForm& theta, uint32_t n,
                                   const std::vector<uint64_t>& x,
                                   const std::vector<uint64_t>& y);

/// Q_p value known modulo p^{known_mod - den_exp}: value = num / p^{den_exp}.
struct QpValue {
    uint64_t num = 0;
    uint32_t den_exp = 0;
    uint32_t known_mod = 0;  // num is exact mod p^known_mod
};

bool qp_values_agree(const QpValue& x, const QpValue& y, uint32_t p);

/// ell-specialization on the free parts of the coinvariants; depends on the
/// chosen generator c * omega_n of the level ideal (c a unit series).
struct HeightForm {
    uint32_t level = 0;
    uint32_t left_rank = 0, right_rank = 0;
    std::vector<QpValue> values;  // row-major
    std::string generator_note;
};

HeightForm specialize_height(const SesquiForm& theta, uint32_t n, const Series1& generator_unit);

// --- verdicts -----------------------------------------------------------------

struct NondegeneracyReport {
    bool pole = false;
    std::vector<uint32_t> kernel_orders, cokernel_orders;
    bool nondegenerate = false;
    std::optional<std::vector<uint64_t>> kernel_witness;  // element of the left module
    bool kernel_criterion_checked = false;
    bool kernel_criterion_torsion = false;  // ker(M^p -> M/p) is torsion
};

NondegeneracyReport nondegeneracy_test(const SesquiForm& theta, uint32_t n);
NondegeneracyReport nondegeneracy_finite(const FiniteForm& form);

struct AxiomViolation {
    std::string axiom;
    uint32_t i = 0, j = 0;
};

struct AxiomReport {
    bool all_pass = true;
    std::vector<AxiomViolation> violations;

    void fail(const std::string& axiom, uint32_t i, uint32_t j) {
        all_pass = false;
        violations.push_back({axiom, i, j});
    }
};

struct AxiomFlags {
    bool sesquilinear = false;
    bool galois = false;
    bool alternating = false;
    bool symmetric = false;
};

AxiomReport check_axioms(const SesquiForm& theta, const AxiomFlags& claimed);
AxiomReport check_axioms_finite(const FiniteForm& form, const AxiomFlags& claimed);
// Prop-3.2.4-style swap symmetry of theta against a partner form.
AxiomReport check_swap_symmetry(const SesquiForm& theta, const SesquiForm& partner);

/// Square-order certificate for a nondegenerate alternating form: N = H x H^
/// with the hyperbolic pairs as witness.
struct SquareOrderResult {
    bool refused = false;
    std::string reason;
    std::optional<std::vector<uint64_t>> kernel_witness;
    bool even_exponent = false;
    std::vector<uint32_t> witness_orders;  // orders of H
    bool witness_checked = false;
};

SquareOrderResult alternating_square_order(const FiniteForm& form);

/// Functional equation: do f and its involute generate the same ideal, and
/// with which sign epsilon?
struct FunceqResult {
    bool holds = false;
    std::optional<int> epsilon;
};

FunceqResult functional_equation_check(const Series1& f);
FunceqResult functional_equation_check(const Series2& f);

}  // namespace iwa
