#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shellfield/geometry.hpp"

// Test functions: smooth spacetime functions used to smear the field.
// Two families:
//
//  * GaussianPacketSum -- finite sums of Gaussian packets
//        A * exp(-1/2 (x-c)^T P (x-c)) * exp(-i kappa.(x-c))
//    with SPD precision matrix P and Minkowski carrier phase. The family
//    is closed in exact form under conjugation, translation, parity,
//    time reversal, boosts, and linear combination, and has a closed-form
//    Fourier transform.
//
//  * GridBump -- compactly supported functions given by samples on a
//    uniform grid over a support box, zero on the box boundary. The
//    canonical construction is the mollifier exp(-1/(1-|x/r|^2)).
//
// Fourier convention:  ft(k) = Int f(x) exp(i(k0 t - kvec.xvec)) d^d x.
//
// A frequency mask records an exact theta(k0) (or theta(-k0)) factor on
// the spectrum, produced by positive_frequency_projection and mapped
// through conjugation/time reversal. Values are immutable after
// construction; all operations return new values.

namespace shellfield {

enum class FreqMask { none, positive, negative };

struct GaussianTerm {
    Complex amplitude;
    Vec center;     // spacetime center c
    Mat precision;  // SPD precision matrix P (position space)
    Vec carrier;    // carrier wave vector kappa

    // Derived quantities, filled by TestFunction construction.
    Mat covariance;         // P^{-1}: spectrum quadratic form
    Real fourier_norm = 0;  // (2 pi)^{d/2} / sqrt(det P)
};

namespace detail {

struct PacketData {
    std::vector<GaussianTerm> terms;
};

struct GridData {
    Vec lo, hi;                    // support box, per-axis [lo, hi]
    std::array<int, kMaxDim> shape{};  // samples per axis (>= 3)
    std::vector<Complex> samples;  // row-major, boundary samples exactly 0
    bool approximate = false;      // set by resampling operations

    // Ellipsoid support metadata when built from the mollifier; used for
    // causal-separation classification of bump pairs.
    bool has_ellipsoid = false;
    Vec ell_center, ell_radius;

    Real spacing(int axis) const {
        return (hi[axis] - lo[axis]) / static_cast<Real>(shape[static_cast<size_t>(axis)] - 1);
    }
};

struct Payload {
    int dim = 0;
    FreqMask mask = FreqMask::none;
    std::variant<PacketData, GridData> data;
    std::uint64_t uid = 0;
};

}  // namespace detail

class FourierRep;

class TestFunction {
  public:
    enum class Kind { GaussianPacketSum, GridBump };

    // Packet-sum construction from per-axis widths (diagonal precision).
    struct PacketTermSpec {
        Complex amplitude{1.0, 0.0};
        Vec center;
        Vec widths;   // per-axis Gaussian widths sigma > 0
        Vec carrier;  // may be zero vector
    };
    static TestFunction gaussian_packet(int dim, const std::vector<PacketTermSpec>& terms);

    // General construction with explicit precision matrices.
    static TestFunction gaussian_packet_terms(int dim, std::vector<GaussianTerm> terms,
                                              FreqMask mask = FreqMask::none);

    // GridBump from explicit samples (row-major); boundary samples must be 0.
    static TestFunction grid_bump(int dim, const Vec& lo, const Vec& hi,
                                  const std::array<int, kMaxDim>& shape,
                                  std::vector<Complex> samples);

    // Canonical compactly supported bump: amplitude * exp(-1/(1 - rho^2)),
    // rho^2 = sum_a ((x_a - c_a)/r_a)^2, sampled on an odd grid over the
    // bounding box of the support ellipsoid.
    static TestFunction mollifier(const Vec& center, const Vec& radius,
                                  Complex amplitude = {1.0, 0.0}, int samples_per_axis = 81);

    Kind kind() const;
    int dim() const { return p_->dim; }
    FreqMask mask() const { return p_->mask; }
    bool positive_frequency() const { return p_->mask == FreqMask::positive; }
    std::uint64_t uid() const { return p_->uid; }

    bool is_grid() const;
    bool compact_support() const { return is_grid(); }

    // Structural test: f equals its own conjugate (real-valued function).
    bool is_real(Real tol = 1e-12) const;

    // sup |ft| proxy: sum of term peaks (packets) or h^d * sum |samples|
    // (grids). Used to normalize smallness checks.
    Real spectrum_scale() const;

    const detail::Payload& payload() const { return *p_; }

  private:
    explicit TestFunction(std::shared_ptr<const detail::Payload> p) : p_(std::move(p)) {}
    friend TestFunction make_testfn(detail::Payload&& payload);
    std::shared_ptr<const detail::Payload> p_;
};

// Internal factory used by the implementation.
TestFunction make_testfn(detail::Payload&& payload);

// Position-space evaluation. Frequency-masked functions are evaluated by
// quadrature of the inverse transform of the masked spectrum.
Complex evaluate(const TestFunction& f, const SpacetimePoint& x);

// Pointwise algebra (exact; operands must share representation kind,
// dimension, mask, and -- for grids -- box and shape).
TestFunction add(const TestFunction& f, const TestFunction& g);
TestFunction scale(Complex s, const TestFunction& f);
TestFunction subtract(const TestFunction& f, const TestFunction& g);
TestFunction real_part(const TestFunction& f);  // (f + f*)/2
TestFunction imag_part(const TestFunction& f);  // (f - f*)/(2i)

// f*(x) = conj(f(x)); spectrum contract (f*)~(k) = conj(ft(-k)).
TestFunction conjugate(const TestFunction& f);

// (translate f)(x) = f(x - a); exact for both kinds.
TestFunction translate(const TestFunction& f, const SpacetimePoint& a);

// Proper orthochronous boost in the (t, axis) plane. Exact on packet
// sums; grid bumps are resampled and marked approximate. Rejects
// frequency-masked inputs (the mask half-space is not representable
// after a boost).
TestFunction boost(const TestFunction& f, Real rapidity, int axis = 1);

// (P f)(t, xvec) = f(t, -xvec); exact.
TestFunction parity_reverse(const TestFunction& f);

// (T f)(t, xvec) = f(-t, xvec); exact. Flips the frequency mask.
TestFunction time_reverse(const TestFunction& f);

// f+ with ft+(k) = theta(k0) ft(k); idempotent; result flagged.
TestFunction positive_frequency_projection(const TestFunction& f);

// Fourier representation; see fourier.hpp.
FourierRep fourier(const TestFunction& f);

// Convenience: fourier(f).evaluate(k).
Complex spectrum(const TestFunction& f, const WaveVector& k);

}  // namespace shellfield
