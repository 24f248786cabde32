#include "shellfield/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shellfield/quadrature.hpp"

namespace shellfield {

using detail::GridData;
using detail::PacketData;
using detail::Payload;

namespace {

bool mask_allows(FreqMask mask, Real k0) {
    switch (mask) {
        case FreqMask::none: return true;
        case FreqMask::positive: return k0 > 0.0;
        case FreqMask::negative: return k0 < 0.0;
    }
    return true;
}

Complex packet_spectrum(const PacketData& d, const Vec& k) {
    Complex acc{0.0, 0.0};
    for (const GaussianTerm& t : d.terms) {
        const Vec b = eta_apply(k - t.carrier);
        Real quad = 0.0;
        for (int i = 0; i < b.dim(); ++i) {
            Real row = 0.0;
            for (int j = 0; j < b.dim(); ++j) row += t.covariance.at(i, j) * b[j];
            quad += b[i] * row;
        }
        const Real phase = minkowski(k, t.center);
        acc += t.amplitude * t.fourier_norm * std::exp(-0.5 * quad) *
               Complex{std::cos(phase), std::sin(phase)};
    }
    return acc;
}

// Semidiscrete transform h^d sum_j f_j exp(i k.x_j), contracted one axis at
// a time with precomputed per-axis phase vectors so only the innermost pass
// touches every sample (complex multiplies, not exponentials).
Complex grid_spectrum(const GridData& g, int dim, const Vec& k) {
    std::array<std::vector<Complex>, kMaxDim> phases;
    Real cell = 1.0;
    for (int a = 0; a < dim; ++a) {
        const auto ua = static_cast<size_t>(a);
        const int n = g.shape[ua];
        const Real h = g.spacing(a);
        cell *= h;
        const Real sign = (a == 0) ? 1.0 : -1.0;  // k.x = k0 t - kvec.xvec
        phases[ua].resize(static_cast<size_t>(n));
        const Real step = sign * k[a] * h;
        const Real base = sign * k[a] * g.lo[a];
        // exp(i(base + j step)) by recurrence, with periodic resync.
        const Complex rot{std::cos(step), std::sin(step)};
        Complex cur{std::cos(base), std::sin(base)};
        for (int j = 0; j < n; ++j) {
            if (j % 256 == 0) {
                const Real ang = base + step * static_cast<Real>(j);
                cur = {std::cos(ang), std::sin(ang)};
            }
            phases[ua][static_cast<size_t>(j)] = cur;
            cur *= rot;
        }
    }
    // Contract from the last axis inward.
    std::vector<Complex> buf = g.samples;
    size_t rows = buf.size();
    for (int a = dim - 1; a >= 1; --a) {
        const auto ua = static_cast<size_t>(a);
        const size_t n = static_cast<size_t>(g.shape[ua]);
        rows /= n;
        for (size_t r = 0; r < rows; ++r) {
            Complex acc{0.0, 0.0};
            const Complex* row = buf.data() + r * n;
            const Complex* ph = phases[ua].data();
            for (size_t j = 0; j < n; ++j) acc += row[j] * ph[j];
            buf[r] = acc;
        }
    }
    Complex acc{0.0, 0.0};
    for (size_t j = 0; j < rows; ++j) acc += buf[j] * phases[0][j];
    return cell * acc;
}

Complex raw_spectrum(const Payload& p, const Vec& k) {
    if (const auto* g = std::get_if<GridData>(&p.data)) return grid_spectrum(*g, p.dim, k);
    return packet_spectrum(std::get<PacketData>(p.data), k);
}

struct AxisRange {
    Real lo, hi;
};

// k-space integration box covering the payload's spectrum support.
std::vector<AxisRange> spectrum_box(const Payload& p) {
    std::vector<AxisRange> box(static_cast<size_t>(p.dim));
    if (const auto* g = std::get_if<GridData>(&p.data)) {
        for (int a = 0; a < p.dim; ++a) {
            const Real nyq = kPi / g->spacing(a);
            box[static_cast<size_t>(a)] = {-nyq, nyq};
        }
        return box;
    }
    const auto& terms = std::get<PacketData>(p.data).terms;
    for (int a = 0; a < p.dim; ++a) {
        Real lo = 0.0, hi = 0.0;
        bool first = true;
        for (const GaussianTerm& t : terms) {
            const Real sigma_k = std::sqrt(t.covariance.at(a, a));
            const Real tlo = t.carrier[a] - 8.0 * sigma_k;
            const Real thi = t.carrier[a] + 8.0 * sigma_k;
            if (first || tlo < lo) lo = tlo;
            if (first || thi > hi) hi = thi;
            first = false;
        }
        box[static_cast<size_t>(a)] = {lo, hi};
    }
    return box;
}

}  // namespace

namespace detail {

// Inverse transform of the masked spectrum:
//   f(x) = (2 pi)^{-d} Int ft(k) theta-mask(k0) exp(-i k.x) d^d k
// over the spectrum box clipped by the mask half-space.
Complex masked_evaluate(const Payload& p, const Vec& x) {
    std::vector<AxisRange> box = spectrum_box(p);
    if (p.mask == FreqMask::positive) box[0].lo = std::max(box[0].lo, 0.0);
    if (p.mask == FreqMask::negative) box[0].hi = std::min(box[0].hi, 0.0);
    if (!(box[0].hi > box[0].lo)) return {0.0, 0.0};

    std::array<std::vector<QuadNode>, kMaxDim> axis_nodes;
    for (int a = 0; a < p.dim; ++a) {
        const AxisRange r = box[static_cast<size_t>(a)];
        // Resolve both the spectrum and the oscillation exp(-i k.x).
        const Real cycles = (r.hi - r.lo) * (std::fabs(x[a]) + 1.0) / kTwoPi;
        const int panels = std::clamp(static_cast<int>(std::ceil(cycles / 2.0)) + 8, 8, 192);
        axis_nodes[static_cast<size_t>(a)] = composite_gauss(r.lo, r.hi, panels);
    }

    KahanSum sum;
    std::array<size_t, kMaxDim> idx{};
    const int d = p.dim;
    for (;;) {
        Vec k(d);
        Real w = 1.0;
        for (int a = 0; a < d; ++a) {
            const QuadNode& q = axis_nodes[static_cast<size_t>(a)][idx[static_cast<size_t>(a)]];
            k[a] = q.x;
            w *= q.w;
        }
        const Real phase = -minkowski(k, x);
        sum.add(w * raw_spectrum(p, k) * Complex{std::cos(phase), std::sin(phase)});
        int a = d - 1;
        for (; a >= 0; --a) {
            auto ua = static_cast<size_t>(a);
            if (++idx[ua] < axis_nodes[ua].size()) break;
            idx[ua] = 0;
        }
        if (a < 0) break;
    }
    return sum.value() / std::pow(kTwoPi, static_cast<Real>(d));
}

}  // namespace detail

FourierRep::FourierRep(const TestFunction& f) : fn_(f) {
    if (const auto* g = std::get_if<GridData>(&f.payload().data)) {
        for (int a = 0; a < f.dim(); ++a)
            if (g->shape[static_cast<size_t>(a)] < kMinGridSamplesForSpectrum)
                throw std::invalid_argument(
                    "fourier: grid resolution below the reliable-spectrum minimum");
    }
}

FourierRep::Kind FourierRep::kind() const {
    return fn_.is_grid() ? Kind::GridSpectrum : Kind::ClosedForm;
}

Complex FourierRep::evaluate(const WaveVector& k) const {
    const Payload& p = fn_.payload();
    if (k.dim() != p.dim) throw std::invalid_argument("FourierRep: wave-vector dimension mismatch");
    if (!mask_allows(p.mask, k.coords[0])) return {0.0, 0.0};
    return raw_spectrum(p, k.coords);
}

void FourierRep::evaluate_batch(std::span<const WaveVector> ks, std::span<Complex> out) const {
    for (size_t i = 0; i < ks.size(); ++i) out[i] = evaluate(ks[i]);
}

Vec FourierRep::nyquist() const {
    const Payload& p = fn_.payload();
    const auto* g = std::get_if<GridData>(&p.data);
    if (!g) throw std::logic_error("FourierRep::nyquist: closed-form spectrum has no lattice");
    Vec nyq(p.dim);
    for (int a = 0; a < p.dim; ++a) nyq[a] = kPi / g->spacing(a);
    return nyq;
}

FourierRep fourier(const TestFunction& f) { return FourierRep(f); }

}  // namespace shellfield
