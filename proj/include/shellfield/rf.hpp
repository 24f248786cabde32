#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shellfield/fock.hpp"
#include "shellfield/shell.hpp"
#include "shellfield/testfn.hpp"

// Monte Carlo realization of the continuous random field over a finite
// mode set: smeared values phi_f are jointly Gaussian with mean zero and
// the covariance induced by the pairing kernel. Complex modes are split
// into real and imaginary parts and sampled as a doubled real Gaussian
// system; the real covariance is the real symmetric part of the pairing
// of the components (for real modes under either kernel tag this is the
// classical covariance, which is what a real random field can carry).

namespace shellfield {

struct ModeSet {
    struct Entry {
        std::string id;
        TestFunction fn;
    };
    std::vector<Entry> modes;

    void validate() const;  // non-empty, unique ids
    int size() const { return static_cast<int>(modes.size()); }
};

class GramMatrix {
  public:
    KernelKind kernel() const { return kernel_; }
    const ShellConfig& config() const { return cfg_; }
    const std::vector<std::string>& ids() const { return ids_; }
    int size() const { return static_cast<int>(ids_.size()); }

    // Conjugate-symmetrized Hermitian pairing matrix C_ij = (f_i, f_j)
    // (the pairing conjugates its first slot), row-major.
    const std::vector<Complex>& matrix() const { return c_; }
    Complex at(int i, int j) const {
        return c_[static_cast<size_t>(i) * ids_.size() + static_cast<size_t>(j)];
    }

    Real trace() const;
    Real min_eigenvalue() const;

    // Doubled real Gaussian system used by sample().
    struct RealSystem {
        // Per mode: index of the real component, and of the imaginary
        // component (-1 for real modes).
        std::vector<int> re_index;
        std::vector<int> im_index;
        std::vector<Real> covariance;  // row-major S x S
        int size = 0;
    };
    const RealSystem& real_system() const { return rs_; }

  private:
    friend GramMatrix gram(const ModeSet& modes, KernelKind kind, const ShellConfig& cfg);
    KernelKind kernel_ = KernelKind::Classical;
    ShellConfig cfg_{};
    std::vector<std::string> ids_;
    std::vector<Complex> c_;
    RealSystem rs_;
};

// Builds the pairing matrix and the sampling system; throws
// QuadratureError if the matrix fails the PSD tolerance
// (min eigenvalue < -1e-10 * trace).
GramMatrix gram(const ModeSet& modes, KernelKind kind, const ShellConfig& cfg);

inline constexpr Real kPsdTolerance = 1e-10;

struct SampleBatch {
    std::int64_t n = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> mode_ids;
    std::vector<Complex> draws;  // n x M row-major
    KernelKind kernel = KernelKind::Classical;
    std::string rng;  // RNG algorithm tag

    Complex at(std::int64_t sample, int mode) const {
        return draws[static_cast<size_t>(sample) * mode_ids.size() + static_cast<size_t>(mode)];
    }
};

// Draws n joint Gaussian vectors (mean zero, covariance from gm) by
// spectral factorization with negative eigenvalues clipped at
// -1e-10 * trace; deterministic in seed and independent of `threads`.
SampleBatch sample(const GramMatrix& gm, std::int64_t n, std::uint64_t seed, int threads = 1);

struct MomentEstimate {
    int order = 0;
    Real value = 0.0;
    Real stderr_jackknife = 0.0;
    bool large_error_warning = false;  // standard error above half the estimate
};

// Sample moments of a real mode with delete-one jackknife errors.
// Orders must lie in [1, 8]; the mode must be real.
std::vector<MomentEstimate> empirical_moments(const SampleBatch& batch, int mode_index,
                                              const std::vector<int>& orders);
inline constexpr int kMaxEmpiricalOrder = 8;

struct CompareMomentRow {
    std::string mode_id;
    int order = 0;
    Real predicted = 0.0;  // engine moment, classical kernel
    Real empirical = 0.0;
    Real stderr_ = 0.0;
    Real z = 0.0;
};

struct Factor2Row {
    std::string mode_id;
    Complex quantum;    // (f+, f+)
    Complex classical;  // (f+, f+)_C
    Real ratio = 0.0;   // |quantum| / |classical|
    Real residual = 0.0;  // |quantum - 2 classical|
};

struct CompareReport {
    std::int64_t n = 0;
    std::uint64_t seed = 0;
    std::string rng;
    std::vector<CompareMomentRow> moments;   // real modes only
    std::vector<Factor2Row> factor2;         // all modes, projected
    std::vector<std::string> skipped_modes;  // complex modes (no real moments)
};

// Vacuum-sector cross-check: engine moments (classical kernel) vs Monte
// Carlo with z-scores, plus the projected-mode quantum/classical ratio
// table. An empty order list produces a header-only report.
CompareReport compare_to_fock(const ModeSet& modes, const std::vector<int>& orders,
                              std::int64_t n, std::uint64_t seed, const ShellConfig& cfg);

}  // namespace shellfield
