#pragma once

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "shellfield/shell.hpp"
#include "shellfield/testfn.hpp"

// Formal creation/annihilation algebra over labeled test functions with
// the CCR  [a_g, adag_f] = (f, g),  [a_f, a_g] = 0,  parametric in the
// pairing kernel. Expressions are finite sums of complex-weighted
// operator words; normal ordering moves annihilators right, inserting
// pairing scalars, and vacuum expectation values are the identity-word
// coefficients of the normal form.

namespace shellfield {

enum class OpFlavor { Annihilate, Create };

struct OperatorSymbol {
    OpFlavor flavor;
    TestFunction label;
    std::string name;  // display name for rendering
};

OperatorSymbol annihilate(TestFunction f, std::string name = "");
OperatorSymbol create(TestFunction f, std::string name = "");
OperatorSymbol adjoint(const OperatorSymbol& s);

class OperatorExpr {
  public:
    struct Term {
        Complex coef;
        std::vector<OperatorSymbol> word;  // empty word = identity
    };

    OperatorExpr() = default;  // zero expression

    static OperatorExpr identity(Complex coef = {1.0, 0.0});
    static OperatorExpr symbol(OperatorSymbol s);
    static OperatorExpr from_terms(std::vector<Term> terms);
    // Smeared field phi_f = a_f + adag_{f*}.
    static OperatorExpr field(const TestFunction& f, const std::string& name = "");

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int max_word_length() const;

    OperatorExpr& operator+=(const OperatorExpr& o);
    OperatorExpr& operator-=(const OperatorExpr& o);
    friend OperatorExpr operator+(OperatorExpr a, const OperatorExpr& b) { return a += b; }
    friend OperatorExpr operator-(OperatorExpr a, const OperatorExpr& b) { return a -= b; }
    friend OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b);
    friend OperatorExpr operator*(Complex c, OperatorExpr e);
    OperatorExpr adjoint() const;
    OperatorExpr pow(int n) const;

    // Combine like words (by label identity) and drop exact-zero terms.
    OperatorExpr collected() const;

    // Term-map equality with coefficient tolerance; compare normal forms
    // to decide equality of operators.
    bool approx_equal(const OperatorExpr& other, Real tol = 1e-12) const;

    // Stable plain-text form, e.g. "a†[f] a[g] + (0.5+0i)·1"; terms are
    // ordered by word length then by symbol names.
    std::string render() const;

  private:
    std::vector<Term> terms_;
};

// Memoized pairing scalars keyed by label identity, for one kernel and
// config. Reuse one table across many vev/normal_order calls to avoid
// repeating quadrature; a fresh table is made internally when the
// kernel/config overloads are used.
class PairingTable {
  public:
    PairingTable(KernelKind kind, ShellConfig cfg) : kind_(kind), cfg_(std::move(cfg)) {}

    KernelKind kind() const { return kind_; }
    const ShellConfig& config() const { return cfg_; }

    // ip(create-label, annih-label): the scalar inserted when an
    // annihilator moves across a creator.
    Complex ip(const TestFunction& create_label, const TestFunction& annih_label);

  private:
    KernelKind kind_;
    ShellConfig cfg_;
    std::map<std::pair<std::uint64_t, std::uint64_t>, Complex> memo_;
};

OperatorExpr normal_order(const OperatorExpr& e, PairingTable& table);
OperatorExpr normal_order(const OperatorExpr& e, KernelKind kind, const ShellConfig& cfg);

Complex vev(const OperatorExpr& e, PairingTable& table);
Complex vev(const OperatorExpr& e, KernelKind kind, const ShellConfig& cfg);

// [a_g, adag_f] = (f, g) under the selected kernel. Same-flavor
// commutators are structurally zero; see ccr_same_flavor.
Complex ccr_commutator(const TestFunction& f, const TestFunction& g, KernelKind kind,
                       const ShellConfig& cfg);
// [a_f, a_g] and [adag_f, adag_g]: identically zero, reported structurally.
Complex ccr_same_flavor();

// <0| phi_f^n |0>; n <= 12 (the pairing count grows factorially).
Complex field_moment(const TestFunction& f, int n, KernelKind kind, const ShellConfig& cfg);
inline constexpr int kMaxMomentPower = 12;

// Scalar value of [phi_f, phi_g] = ip(g*, f) - ip(f*, g), computed through
// the Wick engine; agrees with shell::commutator_kernel at the same
// quadrature.
Complex field_commutator(const TestFunction& f, const TestFunction& g, KernelKind kind,
                         const ShellConfig& cfg);

// States of the form (sum of creation words) |0>.
class FockState {
  public:
    static FockState vacuum();
    static FockState one_particle(const TestFunction& g, std::string name = "");
    static FockState from_expr(OperatorExpr creation_expr);  // creation-only words

    const OperatorExpr& expr() const { return expr_; }

  private:
    explicit FockState(OperatorExpr e) : expr_(std::move(e)) {}
    OperatorExpr expr_;
};

// <state| X_f |state> with X_f = adag_f |0><0| a_f / (f,f), the state
// normalized internally. For a one-particle |g> this is
// |(f,g)|^2 / ((f,f)(g,g)).
Real resonance_probability(const TestFunction& f, const FockState& state, KernelKind kind,
                           const ShellConfig& cfg);

// Operator norm of [X_f, X_g] (quantum kernel) restricted to the span of
// {adag_f|0>, adag_g|0>}, via the closed 2x2 generalized eigenproblem.
Real resonance_nonlocality_witness(const TestFunction& f, const TestFunction& g,
                                   const ShellConfig& cfg);

class ZeroNormError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace shellfield
