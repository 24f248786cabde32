#include "shellfield/testfn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "shellfield/fourier.hpp"

namespace shellfield {

namespace detail {
// Defined in fourier.cpp: inverse-transform quadrature for masked payloads.
Complex masked_evaluate(const Payload& p, const Vec& x);
}  // namespace detail

using detail::GridData;
using detail::PacketData;
using detail::Payload;

namespace {

std::atomic<std::uint64_t> g_uid_counter{1};

void check_dim(int dim) {
    if (dim < 2 || dim > kMaxDim)
        throw std::invalid_argument("TestFunction: dimension must be 2, 3, or 4");
}

// Cholesky factor check for SPD precision matrices (d <= 4).
bool cholesky_spd(const Mat& p) {
    const int n = p.dim();
    Mat l(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            Real s = p.at(i, j);
            for (int k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
            if (i == j) {
                if (s <= 0.0) return false;
                l.at(i, i) = std::sqrt(s);
            } else {
                l.at(i, j) = s / l.at(j, j);
            }
        }
    }
    return true;
}

GaussianTerm finalize_term(int dim, GaussianTerm t) {
    if (t.center.dim() != dim || t.carrier.dim() != dim || t.precision.dim() != dim)
        throw std::invalid_argument("GaussianTerm: dimension mismatch");
    // Symmetrize before the SPD check; transforms keep P symmetric.
    Mat sym(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) sym.at(i, j) = 0.5 * (t.precision.at(i, j) + t.precision.at(j, i));
    t.precision = sym;
    if (!cholesky_spd(t.precision))
        throw std::invalid_argument("GaussianTerm: precision matrix must be positive definite");
    t.covariance = t.precision.inverse();
    t.fourier_norm = std::pow(kTwoPi, 0.5 * static_cast<Real>(dim)) / std::sqrt(t.precision.det());
    return t;
}

size_t total_samples(const std::array<int, kMaxDim>& shape, int dim) {
    size_t n = 1;
    for (int a = 0; a < dim; ++a) n *= static_cast<size_t>(shape[static_cast<size_t>(a)]);
    return n;
}

bool is_boundary_index(const std::array<int, kMaxDim>& idx, const std::array<int, kMaxDim>& shape,
                       int dim) {
    for (int a = 0; a < dim; ++a) {
        const auto ua = static_cast<size_t>(a);
        if (idx[ua] == 0 || idx[ua] == shape[ua] - 1) return true;
    }
    return false;
}

template <typename Fn>
void for_each_index(const std::array<int, kMaxDim>& shape, int dim, Fn&& fn) {
    std::array<int, kMaxDim> idx{};
    const size_t n = total_samples(shape, dim);
    for (size_t flat = 0; flat < n; ++flat) {
        fn(idx, flat);
        for (int a = dim - 1; a >= 0; --a) {
            const auto ua = static_cast<size_t>(a);
            if (++idx[ua] < shape[ua]) break;
            idx[ua] = 0;
        }
    }
}

Complex packet_eval(const PacketData& d, const Vec& x) {
    Complex acc{0.0, 0.0};
    for (const GaussianTerm& t : d.terms) {
        const Vec u = x - t.center;
        Real quad = 0.0;
        for (int i = 0; i < u.dim(); ++i) {
            Real row = 0.0;
            for (int j = 0; j < u.dim(); ++j) row += t.precision.at(i, j) * u[j];
            quad += u[i] * row;
        }
        const Real phase = -minkowski(t.carrier, u);
        acc += t.amplitude * std::exp(-0.5 * quad) * Complex{std::cos(phase), std::sin(phase)};
    }
    return acc;
}

Complex grid_eval(const GridData& g, int dim, const Vec& x) {
    std::array<int, kMaxDim> base{};
    std::array<Real, kMaxDim> frac{};
    for (int a = 0; a < dim; ++a) {
        const auto ua = static_cast<size_t>(a);
        const int n = g.shape[ua];
        if (x[a] < g.lo[a] || x[a] > g.hi[a]) return {0.0, 0.0};
        const Real u = (x[a] - g.lo[a]) / g.spacing(a);
        int j = static_cast<int>(std::floor(u));
        j = std::clamp(j, 0, n - 2);
        base[ua] = j;
        frac[ua] = u - static_cast<Real>(j);
    }
    // Multilinear interpolation over the 2^dim cell corners.
    Complex acc{0.0, 0.0};
    const int corners = 1 << dim;
    for (int c = 0; c < corners; ++c) {
        Real w = 1.0;
        size_t flat = 0;
        for (int a = 0; a < dim; ++a) {
            const auto ua = static_cast<size_t>(a);
            const int bit = (c >> a) & 1;
            w *= bit ? frac[ua] : (1.0 - frac[ua]);
            flat = flat * static_cast<size_t>(g.shape[ua]) + static_cast<size_t>(base[ua] + bit);
        }
        if (w != 0.0) acc += w * g.samples[flat];
    }
    return acc;
}

// Apply an invertible coordinate map x -> S x to a packet sum:
// (f o S^{-1}) has center S c, carrier S kappa, precision S^{-T} P S^{-1}.
PacketData map_packet(const PacketData& d, int dim, const Mat& s, const Mat& s_inv) {
    PacketData out;
    out.terms.reserve(d.terms.size());
    const Mat s_inv_t = s_inv.transpose();
    for (const GaussianTerm& t : d.terms) {
        GaussianTerm nt;
        nt.amplitude = t.amplitude;
        nt.center = s.apply(t.center);
        nt.carrier = s.apply(t.carrier);
        nt.precision = s_inv_t * (t.precision * s_inv);
        out.terms.push_back(finalize_term(dim, nt));
    }
    return out;
}

Mat parity_matrix(int dim) {
    Mat s = Mat::identity(dim);
    for (int a = 1; a < dim; ++a) s.at(a, a) = -1.0;
    return s;
}

Mat time_matrix(int dim) {
    Mat s = Mat::identity(dim);
    s.at(0, 0) = -1.0;
    return s;
}

FreqMask flip_mask(FreqMask m) {
    if (m == FreqMask::positive) return FreqMask::negative;
    if (m == FreqMask::negative) return FreqMask::positive;
    return FreqMask::none;
}

// Reverse sample order along `axis` and negate the box on that axis.
GridData reflect_grid(const GridData& g, int dim, int axis) {
    GridData out = g;
    const Real lo = g.lo[axis], hi = g.hi[axis];
    out.lo[axis] = -hi;
    out.hi[axis] = -lo;
    for_each_index(g.shape, dim, [&](const std::array<int, kMaxDim>& idx, size_t flat) {
        std::array<int, kMaxDim> src = idx;
        const auto ua = static_cast<size_t>(axis);
        src[ua] = g.shape[ua] - 1 - idx[ua];
        size_t src_flat = 0;
        for (int a = 0; a < dim; ++a)
            src_flat = src_flat * static_cast<size_t>(g.shape[static_cast<size_t>(a)]) +
                       static_cast<size_t>(src[static_cast<size_t>(a)]);
        out.samples[flat] = g.samples[src_flat];
    });
    if (out.has_ellipsoid) out.ell_center[axis] = -g.ell_center[axis];
    return out;
}

}  // namespace

TestFunction make_testfn(Payload&& payload) {
    payload.uid = g_uid_counter.fetch_add(1, std::memory_order_relaxed);
    struct Access : TestFunction {
        explicit Access(std::shared_ptr<const Payload> p) : TestFunction(std::move(p)) {}
    };
    return Access(std::make_shared<const Payload>(std::move(payload)));
}

TestFunction TestFunction::gaussian_packet(int dim, const std::vector<PacketTermSpec>& terms) {
    check_dim(dim);
    if (terms.empty()) throw std::invalid_argument("gaussian_packet: at least one term required");
    std::vector<GaussianTerm> out;
    out.reserve(terms.size());
    for (const PacketTermSpec& spec : terms) {
        if (spec.widths.dim() != dim || spec.center.dim() != dim || spec.carrier.dim() != dim)
            throw std::invalid_argument("gaussian_packet: term dimension mismatch");
        Vec prec_diag(dim);
        for (int a = 0; a < dim; ++a) {
            if (!(spec.widths[a] > 0.0))
                throw std::invalid_argument("gaussian_packet: widths must be strictly positive");
            prec_diag[a] = 1.0 / (spec.widths[a] * spec.widths[a]);
        }
        GaussianTerm t;
        t.amplitude = spec.amplitude;
        t.center = spec.center;
        t.carrier = spec.carrier;
        t.precision = Mat::diagonal(prec_diag);
        out.push_back(std::move(t));
    }
    return gaussian_packet_terms(dim, std::move(out));
}

TestFunction TestFunction::gaussian_packet_terms(int dim, std::vector<GaussianTerm> terms,
                                                 FreqMask mask) {
    check_dim(dim);
    if (terms.empty()) throw std::invalid_argument("gaussian_packet_terms: empty term list");
    PacketData data;
    data.terms.reserve(terms.size());
    for (GaussianTerm& t : terms) data.terms.push_back(finalize_term(dim, std::move(t)));
    Payload p;
    p.dim = dim;
    p.mask = mask;
    p.data = std::move(data);
    return make_testfn(std::move(p));
}

TestFunction TestFunction::grid_bump(int dim, const Vec& lo, const Vec& hi,
                                     const std::array<int, kMaxDim>& shape,
                                     std::vector<Complex> samples) {
    check_dim(dim);
    if (lo.dim() != dim || hi.dim() != dim)
        throw std::invalid_argument("grid_bump: box dimension mismatch");
    for (int a = 0; a < dim; ++a) {
        if (!(hi[a] > lo[a])) throw std::invalid_argument("grid_bump: empty support box");
        if (shape[static_cast<size_t>(a)] < 3)
            throw std::invalid_argument("grid_bump: need at least 3 samples per axis");
    }
    if (samples.size() != total_samples(shape, dim))
        throw std::invalid_argument("grid_bump: sample count does not match shape");
    GridData data;
    data.lo = lo;
    data.hi = hi;
    data.shape = shape;
    data.samples = std::move(samples);
    bool boundary_ok = true;
    for_each_index(shape, dim, [&](const std::array<int, kMaxDim>& idx, size_t flat) {
        if (is_boundary_index(idx, shape, dim) && data.samples[flat] != Complex{0.0, 0.0})
            boundary_ok = false;
    });
    if (!boundary_ok)
        throw std::invalid_argument("grid_bump: samples must vanish on the support-box boundary");
    Payload p;
    p.dim = dim;
    p.data = std::move(data);
    return make_testfn(std::move(p));
}

TestFunction TestFunction::mollifier(const Vec& center, const Vec& radius, Complex amplitude,
                                     int samples_per_axis) {
    const int dim = center.dim();
    check_dim(dim);
    if (radius.dim() != dim) throw std::invalid_argument("mollifier: radius dimension mismatch");
    for (int a = 0; a < dim; ++a)
        if (!(radius[a] > 0.0)) throw std::invalid_argument("mollifier: radii must be positive");
    int n = std::max(samples_per_axis, 3);
    if (n % 2 == 0) ++n;  // odd grid puts a node at the center
    GridData data;
    data.lo = center - radius;
    data.hi = center + radius;
    data.shape.fill(1);
    for (int a = 0; a < dim; ++a) data.shape[static_cast<size_t>(a)] = n;
    data.samples.resize(total_samples(data.shape, dim));
    for_each_index(data.shape, dim, [&](const std::array<int, kMaxDim>& idx, size_t flat) {
        Real rho2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            const Real x = data.lo[a] + data.spacing(a) * static_cast<Real>(idx[static_cast<size_t>(a)]);
            const Real u = (x - center[a]) / radius[a];
            rho2 += u * u;
        }
        data.samples[flat] =
            rho2 < 1.0 ? amplitude * std::exp(-1.0 / (1.0 - rho2)) : Complex{0.0, 0.0};
    });
    data.has_ellipsoid = true;
    data.ell_center = center;
    data.ell_radius = radius;
    Payload p;
    p.dim = dim;
    p.data = std::move(data);
    return make_testfn(std::move(p));
}

TestFunction::Kind TestFunction::kind() const {
    return std::holds_alternative<PacketData>(p_->data) ? Kind::GaussianPacketSum : Kind::GridBump;
}

bool TestFunction::is_grid() const { return std::holds_alternative<GridData>(p_->data); }

bool TestFunction::is_real(Real tol) const {
    if (p_->mask != FreqMask::none) return false;
    if (const auto* g = std::get_if<GridData>(&p_->data)) {
        for (const Complex& s : g->samples)
            if (s.imag() != 0.0) return false;
        return true;
    }
    const auto& terms = std::get<PacketData>(p_->data).terms;
    // Each term must have a conjugate partner: conj amplitude, same center
    // and precision, negated carrier. Self-pairing covers real zero-carrier
    // terms.
    std::vector<bool> used(terms.size(), false);
    auto close_vec = [&](const Vec& a, const Vec& b) {
        for (int i = 0; i < a.dim(); ++i)
            if (std::fabs(a[i] - b[i]) > tol * (1.0 + std::fabs(a[i]) + std::fabs(b[i]))) return false;
        return true;
    };
    auto close_mat = [&](const Mat& a, const Mat& b) {
        for (int i = 0; i < a.dim(); ++i)
            for (int j = 0; j < a.dim(); ++j)
                if (std::fabs(a.at(i, j) - b.at(i, j)) >
                    tol * (1.0 + std::fabs(a.at(i, j)) + std::fabs(b.at(i, j))))
                    return false;
        return true;
    };
    for (size_t i = 0; i < terms.size(); ++i) {
        if (used[i]) continue;
        bool matched = false;
        for (size_t j = i; j < terms.size(); ++j) {
            if (used[j] && j != i) continue;
            const Real amp_scale = std::abs(terms[i].amplitude) + 1e-300;
            if (std::abs(terms[j].amplitude - std::conj(terms[i].amplitude)) > tol * amp_scale)
                continue;
            if (!close_vec(terms[j].center, terms[i].center)) continue;
            if (!close_vec(terms[j].carrier, -terms[i].carrier)) continue;
            if (!close_mat(terms[j].precision, terms[i].precision)) continue;
            used[i] = used[j] = true;
            matched = true;
            break;
        }
        if (!matched) return false;
    }
    return true;
}

Real TestFunction::spectrum_scale() const {
    if (const auto* g = std::get_if<GridData>(&p_->data)) {
        Real cell = 1.0;
        for (int a = 0; a < p_->dim; ++a) cell *= g->spacing(a);
        Real sum = 0.0;
        for (const Complex& s : g->samples) sum += std::abs(s);
        return cell * sum;
    }
    Real sum = 0.0;
    for (const GaussianTerm& t : std::get<PacketData>(p_->data).terms)
        sum += std::abs(t.amplitude) * t.fourier_norm;
    return sum;
}

Complex evaluate(const TestFunction& f, const SpacetimePoint& x) {
    const Payload& p = f.payload();
    if (x.dim() != p.dim) throw std::invalid_argument("evaluate: point dimension mismatch");
    if (p.mask != FreqMask::none) return detail::masked_evaluate(p, x.coords);
    if (const auto* g = std::get_if<GridData>(&p.data)) return grid_eval(*g, p.dim, x.coords);
    return packet_eval(std::get<PacketData>(p.data), x.coords);
}

TestFunction add(const TestFunction& f, const TestFunction& g) {
    const Payload& a = f.payload();
    const Payload& b = g.payload();
    if (a.dim != b.dim) throw std::invalid_argument("add: dimension mismatch");
    if (a.mask != b.mask) throw std::invalid_argument("add: frequency-mask mismatch");
    if (const auto* pa = std::get_if<PacketData>(&a.data)) {
        const auto* pb = std::get_if<PacketData>(&b.data);
        if (!pb) throw std::invalid_argument("add: cannot mix packet and grid test functions");
        PacketData out = *pa;
        out.terms.insert(out.terms.end(), pb->terms.begin(), pb->terms.end());
        Payload p;
        p.dim = a.dim;
        p.mask = a.mask;
        p.data = std::move(out);
        return make_testfn(std::move(p));
    }
    const auto& ga = std::get<GridData>(a.data);
    const auto* gb = std::get_if<GridData>(&b.data);
    if (!gb) throw std::invalid_argument("add: cannot mix packet and grid test functions");
    if (!(ga.lo == gb->lo) || !(ga.hi == gb->hi) || ga.shape != gb->shape)
        throw std::invalid_argument("add: grid bumps must share box and shape");
    GridData out = ga;
    for (size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += gb->samples[i];
    out.approximate = ga.approximate || gb->approximate;
    if (!(gb->has_ellipsoid && ga.has_ellipsoid && ga.ell_center == gb->ell_center &&
          ga.ell_radius == gb->ell_radius))
        out.has_ellipsoid = false;
    Payload p;
    p.dim = a.dim;
    p.mask = a.mask;
    p.data = std::move(out);
    return make_testfn(std::move(p));
}

TestFunction scale(Complex s, const TestFunction& f) {
    Payload p;
    p.dim = f.payload().dim;
    p.mask = f.payload().mask;
    if (const auto* g = std::get_if<GridData>(&f.payload().data)) {
        GridData out = *g;
        for (Complex& v : out.samples) v *= s;
        p.data = std::move(out);
    } else {
        PacketData out = std::get<PacketData>(f.payload().data);
        for (GaussianTerm& t : out.terms) t.amplitude *= s;
        p.data = std::move(out);
    }
    return make_testfn(std::move(p));
}

TestFunction subtract(const TestFunction& f, const TestFunction& g) {
    return add(f, scale({-1.0, 0.0}, g));
}

TestFunction real_part(const TestFunction& f) {
    return scale({0.5, 0.0}, add(f, conjugate(f)));
}

TestFunction imag_part(const TestFunction& f) {
    return scale({0.0, -0.5}, subtract(f, conjugate(f)));
}

TestFunction conjugate(const TestFunction& f) {
    const Payload& src = f.payload();
    Payload p;
    p.dim = src.dim;
    p.mask = flip_mask(src.mask);
    if (const auto* g = std::get_if<GridData>(&src.data)) {
        GridData out = *g;
        for (Complex& v : out.samples) v = std::conj(v);
        p.data = std::move(out);
    } else {
        PacketData out = std::get<PacketData>(src.data);
        for (GaussianTerm& t : out.terms) {
            t.amplitude = std::conj(t.amplitude);
            t.carrier = -t.carrier;
        }
        p.data = std::move(out);
    }
    return make_testfn(std::move(p));
}

TestFunction translate(const TestFunction& f, const SpacetimePoint& a) {
    const Payload& src = f.payload();
    if (a.dim() != src.dim) throw std::invalid_argument("translate: offset dimension mismatch");
    Payload p;
    p.dim = src.dim;
    p.mask = src.mask;
    if (const auto* g = std::get_if<GridData>(&src.data)) {
        GridData out = *g;
        out.lo += a.coords;
        out.hi += a.coords;
        if (out.has_ellipsoid) out.ell_center += a.coords;
        p.data = std::move(out);
    } else {
        PacketData out = std::get<PacketData>(src.data);
        for (GaussianTerm& t : out.terms) t.center += a.coords;
        p.data = std::move(out);
    }
    return make_testfn(std::move(p));
}

TestFunction parity_reverse(const TestFunction& f) {
    const Payload& src = f.payload();
    Payload p;
    p.dim = src.dim;
    p.mask = src.mask;
    if (const auto* g = std::get_if<GridData>(&src.data)) {
        GridData out = *g;
        for (int axis = 1; axis < src.dim; ++axis) out = reflect_grid(out, src.dim, axis);
        p.data = std::move(out);
    } else {
        const Mat s = parity_matrix(src.dim);
        p.data = map_packet(std::get<PacketData>(src.data), src.dim, s, s);
    }
    return make_testfn(std::move(p));
}

TestFunction time_reverse(const TestFunction& f) {
    const Payload& src = f.payload();
    Payload p;
    p.dim = src.dim;
    p.mask = flip_mask(src.mask);
    if (const auto* g = std::get_if<GridData>(&src.data)) {
        p.data = reflect_grid(*g, src.dim, 0);
    } else {
        const Mat s = time_matrix(src.dim);
        p.data = map_packet(std::get<PacketData>(src.data), src.dim, s, s);
    }
    return make_testfn(std::move(p));
}

TestFunction boost(const TestFunction& f, Real rapidity, int axis) {
    const Payload& src = f.payload();
    if (axis < 1 || axis >= src.dim) throw std::invalid_argument("boost: axis out of range");
    if (src.mask != FreqMask::none)
        throw std::invalid_argument(
            "boost: frequency-masked test functions cannot be boosted; boost first, then project");
    if (rapidity == 0.0) return f;
    const Mat lam = Mat::boost(src.dim, axis, rapidity);
    const Mat lam_inv = Mat::boost(src.dim, axis, -rapidity);
    Payload p;
    p.dim = src.dim;
    p.mask = FreqMask::none;
    if (const auto* g = std::get_if<GridData>(&src.data)) {
        // Resample f(Lambda^{-1} x) onto the bounding box of the mapped
        // support; approximate by construction.
        GridData out;
        Vec lo(src.dim, 0.0), hi(src.dim, 0.0);
        bool first = true;
        const int corners = 1 << src.dim;
        for (int c = 0; c < corners; ++c) {
            Vec corner(src.dim);
            for (int a = 0; a < src.dim; ++a)
                corner[a] = ((c >> a) & 1) ? g->hi[a] : g->lo[a];
            const Vec mapped = lam.apply(corner);
            for (int a = 0; a < src.dim; ++a) {
                if (first || mapped[a] < lo[a]) lo[a] = mapped[a];
                if (first || mapped[a] > hi[a]) hi[a] = mapped[a];
            }
            first = false;
        }
        out.lo = lo;
        out.hi = hi;
        out.shape.fill(1);
        for (int a = 0; a < src.dim; ++a) {
            const Real h = g->spacing(a);
            int n = static_cast<int>(std::ceil((hi[a] - lo[a]) / h)) + 1;
            n = std::clamp(n, g->shape[static_cast<size_t>(a)], 1025);
            if (n % 2 == 0) ++n;
            out.shape[static_cast<size_t>(a)] = n;
        }
        out.samples.resize(total_samples(out.shape, src.dim));
        for_each_index(out.shape, src.dim, [&](const std::array<int, kMaxDim>& idx, size_t flat) {
            if (is_boundary_index(idx, out.shape, src.dim)) {
                out.samples[flat] = {0.0, 0.0};
                return;
            }
            Vec x(src.dim);
            for (int a = 0; a < src.dim; ++a)
                x[a] = out.lo[a] + out.spacing(a) * static_cast<Real>(idx[static_cast<size_t>(a)]);
            out.samples[flat] = grid_eval(*g, src.dim, lam_inv.apply(x));
        });
        out.approximate = true;
        p.data = std::move(out);
    } else {
        p.data = map_packet(std::get<PacketData>(src.data), src.dim, lam, lam_inv);
    }
    return make_testfn(std::move(p));
}

TestFunction positive_frequency_projection(const TestFunction& f) {
    const Payload& src = f.payload();
    if (src.mask == FreqMask::positive) return f;  // idempotent, exact
    if (src.mask == FreqMask::negative) {
        // theta(k0) theta(-k0) = 0: the zero function.
        return scale({0.0, 0.0}, TestFunction::gaussian_packet(
                                     src.dim, {{Complex{1.0, 0.0}, Vec(src.dim, 0.0),
                                                Vec(src.dim, 1.0), Vec(src.dim, 0.0)}}));
    }
    if (const auto* g = std::get_if<GridData>(&src.data)) {
        if (g->shape[0] < kMinGridSamplesForProjection)
            throw std::invalid_argument(
                "positive_frequency_projection: grid too coarse along the time axis");
    }
    Payload p;
    p.dim = src.dim;
    p.mask = FreqMask::positive;
    p.data = src.data;
    return make_testfn(std::move(p));
}

Complex spectrum(const TestFunction& f, const WaveVector& k) { return fourier(f).evaluate(k); }

}  // namespace shellfield
