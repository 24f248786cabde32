#pragma once

#include <span>
#include <vector>

#include "shellfield/testfn.hpp"

namespace shellfield {

// View of a test function's Fourier transform, evaluable at any wave
// vector under the convention ft(k) = Int f(x) exp(i(k0 t - kvec.xvec)) d^d x.
//
// Packet sums evaluate in closed form. Grid bumps evaluate the
// semidiscrete transform h^d sum_j f_j exp(i k.x_j), which is the exact
// transform of the sampled function at any k (no frequency-lattice
// interpolation); it tracks the underlying smooth function up to the
// Nyquist box of the grid.
class FourierRep {
  public:
    enum class Kind { ClosedForm, GridSpectrum };

    explicit FourierRep(const TestFunction& f);

    Kind kind() const;
    int dim() const { return fn_.dim(); }
    FreqMask mask() const { return fn_.mask(); }

    Complex evaluate(const WaveVector& k) const;
    Complex operator()(const WaveVector& k) const { return evaluate(k); }

    void evaluate_batch(std::span<const WaveVector> ks, std::span<Complex> out) const;

    // GridSpectrum metadata: per-axis Nyquist frequency pi/h. Evaluation
    // beyond the Nyquist box does not track the underlying function.
    Vec nyquist() const;

    const TestFunction& function() const { return fn_; }

  private:
    TestFunction fn_;
};

// Minimum per-axis sample count for a grid spectrum to be considered
// reliable; fourier() rejects coarser grids.
inline constexpr int kMinGridSamplesForSpectrum = 8;

// Minimum time-axis sample count for positive-frequency projection of a
// grid bump (resolution of the theta(k0) edge).
inline constexpr int kMinGridSamplesForProjection = 16;

}  // namespace shellfield
