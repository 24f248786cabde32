#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shellfield/fourier.hpp"
#include "shellfield/testfn.hpp"

// Mass-shell pairings. The delta function in
//
//   (f,g) = hbar Int d^dk/(2 pi)^d 2 pi delta(k.k - m^2) theta(k0) ft*(k) gt(k)
//
// is reduced to an integral over the spatial wave vector with weight
// 1/(2 w_k), w_k = sqrt(|kvec|^2 + m^2):
//
//   quantum:   hbar Int d^{d-1}k/((2 pi)^{d-1} 2 w) ft*(w, kvec) gt(w, kvec)
//   classical: the average of the two shells k0 = +w and k0 = -w (no theta)
//
// both evaluated by deterministic fixed-node quadrature on a symmetric
// cutoff box. Node sets are symmetric under kvec -> -kvec and never
// contain kvec = 0 (the massless 1/(2|k|) singularity is integrable and
// avoided by construction).

namespace shellfield {

enum class KernelKind { Quantum, Classical, EMQuantum };

enum class QuadratureRule { GaussLegendre, Trapezoid };

struct QuadratureSpec {
    Real cutoff = 16.0;  // symmetric per-axis cutoff in |k|
    int nodes = 256;     // requested nodes per axis (>= 16)
    QuadratureRule rule = QuadratureRule::GaussLegendre;
};

struct ShellConfig {
    Real mass = 1.0;
    Real hbar = 1.0;
    int dimension = 2;
    QuadratureSpec quadrature{};

    void validate() const;
};

// Raised when the spectrum is not negligible at the quadrature cutoff
// (tail samples exceed 1e-7 of the function's spectrum scale).
class QuadratureError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

const char* to_string(KernelKind k);

// Quantum pairing (positive shell only). Sesquilinear: conjugate-linear
// in f, linear in g; Hermitian at the quadrature level.
Complex quantum_ip(const TestFunction& f, const TestFunction& g, const ShellConfig& cfg);

// Classical pairing: both shells, no theta(k0), overall factor 1/2.
// Satisfies (f,g)_C = [(f,g) + (g*,f*)]/2 at the same nodes.
Complex classical_ip(const TestFunction& f, const TestFunction& g, const ShellConfig& cfg);

// Kernel dispatch for the scalar pairings (EMQuantum is rejected here;
// it pairs bivectors, not scalars).
Complex pairing(const TestFunction& f, const TestFunction& g, KernelKind kind,
                const ShellConfig& cfg);

struct PairingResult {
    Complex value;
    Real est_error;  // |value - value at half the nodes|
};
PairingResult pairing_with_error(const TestFunction& f, const TestFunction& g, KernelKind kind,
                                 const ShellConfig& cfg);

// Scalar field commutator [phi_f, phi_g] = ip(g*, f) - ip(f*, g) under the
// selected kernel; identically zero for the classical kernel.
Complex commutator_kernel(const TestFunction& f, const TestFunction& g, KernelKind kind,
                          const ShellConfig& cfg);

// Antisymmetric rank-2 array of test functions smearing the field
// strength; components stored once for mu < nu.
class BivectorTestFunction {
  public:
    explicit BivectorTestFunction(int dim = 4);

    int dim() const { return dim_; }
    void set_component(int mu, int nu, TestFunction f);

    // Signed component: (mu, nu) -> (sign, function); nullopt when the
    // slot is zero or mu == nu.
    std::optional<std::pair<Real, TestFunction>> signed_component(int mu, int nu) const;

    Complex spectrum_component(int mu, int nu, const WaveVector& k) const;

  private:
    int dim_;
    std::array<std::optional<TestFunction>, 6> comps_;  // (0,1)(0,2)(0,3)(1,2)(1,3)(2,3)
    static int slot(int mu, int nu);
};

// Antisymmetric-in-(mu,nu) spectrum evaluator; the EM pairing core is
// generic over this so exact non-packet spectra can be paired in tests.
using BivectorSpectrumFn = std::function<Complex(int mu, int nu, const WaveVector& k)>;

// EM pairing on the massless positive shell k0 = |kvec|:
//
//   (f,g)_EM = hbar Int d^3k/((2 pi)^3 2|k|) sum_b s_b conj(A_b) B_b,
//   A_b = k^mu ft_{mu b},  B_b = k^nu gt_{nu b},
//
// with contraction signs s_b = (-1, +1, +1, +1): the overall sign is
// fixed so the diagonal (f,f)_EM is nonnegative (equivalent to raising
// the contracted index with the opposite-signature metric).
Complex em_ip_spectra(const BivectorSpectrumFn& f, const BivectorSpectrumFn& g,
                      const ShellConfig& cfg);

// The pointwise contraction above at one wave vector (no measure factor).
Complex em_contraction(const BivectorSpectrumFn& f, const BivectorSpectrumFn& g,
                       const WaveVector& k);

Complex em_ip(const BivectorTestFunction& f, const BivectorTestFunction& g,
              const ShellConfig& cfg);

// Quadrature node on the mass shell: spatial wave vector, energy, weight.
struct ShellNode {
    Vec kspatial;  // length d-1
    Real omega;
    Real weight;  // product axis weight / (2 pi)^{d-1}
    bool edge;    // within the outermost panel of some axis (tail check)
};

std::vector<ShellNode> build_shell_nodes(const ShellConfig& cfg);

}  // namespace shellfield
