#include "shellfield/shell.hpp"

#include <cmath>

#include "shellfield/quadrature.hpp"

namespace shellfield {

namespace {

std::vector<QuadNode> axis_rule(const QuadratureSpec& q) {
    const Real cut = q.cutoff;
    if (q.rule == QuadratureRule::GaussLegendre) {
        int panels = (q.nodes + 15) / 16;
        if (panels % 2 == 1) ++panels;  // symmetric node set, no node at 0
        return composite_gauss(-cut, cut, panels);
    }
    int n = q.nodes;
    if (n % 2 == 0) ++n;  // odd count keeps the uniform lattice off k = 0
    std::vector<QuadNode> out;
    out.reserve(static_cast<size_t>(n) + 1);
    const Real h = 2.0 * cut / static_cast<Real>(n);
    for (int j = 0; j <= n; ++j) {
        const Real w = (j == 0 || j == n) ? 0.5 * h : h;
        out.push_back({-cut + h * static_cast<Real>(j), w});
    }
    return out;
}

void check_scalar_args(const TestFunction& f, const TestFunction& g, const ShellConfig& cfg) {
    cfg.validate();
    if (f.dim() != cfg.dimension || g.dim() != cfg.dimension)
        throw std::invalid_argument("pairing: test function dimension does not match config");
}

struct TailTracker {
    Real global_max = 0.0;
    Real edge_max = 0.0;
    void record(Real mag, bool edge) {
        if (mag > global_max) global_max = mag;
        if (edge && mag > edge_max) edge_max = mag;
    }
};

constexpr Real kTailFraction = 1e-7;

void enforce_tail(const TailTracker& t, const TestFunction& f, const char* which) {
    const Real scale = f.spectrum_scale();
    if (scale > 0.0 && t.edge_max > kTailFraction * scale) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "pairing: spectrum of %s is not negligible at the quadrature cutoff "
                      "(tail %.3e of scale); raise the cutoff",
                      which, t.edge_max / scale);
        throw QuadratureError(buf);
    }
}

// One shell pass: sum_nodes w/(2 omega) conj(F(s w, kvec)) G(s w, kvec).
Complex shell_half(const FourierRep& fr, const FourierRep& gr, const std::vector<ShellNode>& nodes,
                   int dim, Real sign, TailTracker* ft, TailTracker* gt) {
    KahanSum sum;
    Vec k(dim);
    for (const ShellNode& n : nodes) {
        k[0] = sign * n.omega;
        for (int a = 1; a < dim; ++a) k[a] = n.kspatial[a - 1];
        const WaveVector kv{k};
        const Complex fv = fr.evaluate(kv);
        const Complex gv = gr.evaluate(kv);
        if (ft) ft->record(std::abs(fv), n.edge);
        if (gt) gt->record(std::abs(gv), n.edge);
        sum.add((n.weight / (2.0 * n.omega)) * std::conj(fv) * gv);
    }
    return sum.value();
}

}  // namespace

void ShellConfig::validate() const {
    if (!(mass >= 0.0)) throw std::invalid_argument("ShellConfig: mass must be >= 0");
    if (!(hbar > 0.0)) throw std::invalid_argument("ShellConfig: hbar must be > 0");
    if (dimension < 2 || dimension > kMaxDim)
        throw std::invalid_argument("ShellConfig: dimension must be 2, 3, or 4");
    if (quadrature.nodes < 16) throw std::invalid_argument("ShellConfig: need >= 16 nodes per axis");
    if (!(quadrature.cutoff > 0.0)) throw std::invalid_argument("ShellConfig: cutoff must be > 0");
    if (!(quadrature.cutoff > 4.0 * mass))
        throw std::invalid_argument("ShellConfig: cutoff must exceed 4 * mass");
}

const char* to_string(KernelKind k) {
    switch (k) {
        case KernelKind::Quantum: return "quantum";
        case KernelKind::Classical: return "classical";
        case KernelKind::EMQuantum: return "em-quantum";
    }
    return "?";
}

std::vector<ShellNode> build_shell_nodes(const ShellConfig& cfg) {
    const int spatial = cfg.dimension - 1;
    const std::vector<QuadNode> axis = axis_rule(cfg.quadrature);
    const Real edge_width = 2.0 * cfg.quadrature.cutoff / 16.0;
    const Real edge_lim = cfg.quadrature.cutoff - edge_width;
    const Real norm = std::pow(kTwoPi, static_cast<Real>(spatial));
    std::vector<ShellNode> nodes;
    nodes.reserve(static_cast<size_t>(std::pow(static_cast<Real>(axis.size()), spatial)));
    std::array<size_t, kMaxDim> idx{};
    for (;;) {
        ShellNode n;
        n.kspatial = Vec(spatial);
        Real w = 1.0;
        Real k2 = 0.0;
        bool edge = false;
        for (int a = 0; a < spatial; ++a) {
            const QuadNode& q = axis[idx[static_cast<size_t>(a)]];
            n.kspatial[a] = q.x;
            w *= q.w;
            k2 += q.x * q.x;
            if (std::fabs(q.x) > edge_lim) edge = true;
        }
        n.omega = std::sqrt(k2 + cfg.mass * cfg.mass);
        n.weight = w / norm;
        n.edge = edge;
        nodes.push_back(std::move(n));
        int a = spatial - 1;
        for (; a >= 0; --a) {
            auto ua = static_cast<size_t>(a);
            if (++idx[ua] < axis.size()) break;
            idx[ua] = 0;
        }
        if (a < 0) break;
    }
    return nodes;
}

Complex quantum_ip(const TestFunction& f, const TestFunction& g, const ShellConfig& cfg) {
    check_scalar_args(f, g, cfg);
    const FourierRep fr = fourier(f);
    const FourierRep gr = fourier(g);
    const std::vector<ShellNode> nodes = build_shell_nodes(cfg);
    TailTracker ft, gt;
    const Complex v = cfg.hbar * shell_half(fr, gr, nodes, cfg.dimension, +1.0, &ft, &gt);
    enforce_tail(ft, f, "f");
    enforce_tail(gt, g, "g");
    return v;
}

Complex classical_ip(const TestFunction& f, const TestFunction& g, const ShellConfig& cfg) {
    check_scalar_args(f, g, cfg);
    const FourierRep fr = fourier(f);
    const FourierRep gr = fourier(g);
    const std::vector<ShellNode> nodes = build_shell_nodes(cfg);
    TailTracker ft, gt;
    const Complex plus = shell_half(fr, gr, nodes, cfg.dimension, +1.0, &ft, &gt);
    const Complex minus = shell_half(fr, gr, nodes, cfg.dimension, -1.0, &ft, &gt);
    enforce_tail(ft, f, "f");
    enforce_tail(gt, g, "g");
    return 0.5 * cfg.hbar * (plus + minus);
}

Complex pairing(const TestFunction& f, const TestFunction& g, KernelKind kind,
                const ShellConfig& cfg) {
    switch (kind) {
        case KernelKind::Quantum: return quantum_ip(f, g, cfg);
        case KernelKind::Classical: return classical_ip(f, g, cfg);
        case KernelKind::EMQuantum:
            throw std::invalid_argument("pairing: EM kernel pairs bivector test functions");
    }
    throw std::logic_error("pairing: unknown kernel");
}

PairingResult pairing_with_error(const TestFunction& f, const TestFunction& g, KernelKind kind,
                                 const ShellConfig& cfg) {
    const Complex v = pairing(f, g, kind, cfg);
    ShellConfig half = cfg;
    half.quadrature.nodes = std::max(16, cfg.quadrature.nodes / 2);
    const Complex vh = pairing(f, g, kind, half);
    return {v, std::abs(v - vh)};
}

Complex commutator_kernel(const TestFunction& f, const TestFunction& g, KernelKind kind,
                          const ShellConfig& cfg) {
    if (kind != KernelKind::Quantum && kind != KernelKind::Classical)
        throw std::invalid_argument("commutator_kernel: kernel must be Quantum or Classical");
    const TestFunction fc = conjugate(f);
    const TestFunction gc = conjugate(g);
    return pairing(gc, f, kind, cfg) - pairing(fc, g, kind, cfg);
}

BivectorTestFunction::BivectorTestFunction(int dim) : dim_(dim) {
    if (dim != 4) throw std::invalid_argument("BivectorTestFunction: only d = 4 is supported");
}

int BivectorTestFunction::slot(int mu, int nu) {
    // (0,1)->0 (0,2)->1 (0,3)->2 (1,2)->3 (1,3)->4 (2,3)->5
    static constexpr int table[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
    return table[mu][nu];
}

void BivectorTestFunction::set_component(int mu, int nu, TestFunction f) {
    if (mu < 0 || nu < 0 || mu >= dim_ || nu >= dim_ || mu == nu)
        throw std::invalid_argument("BivectorTestFunction: invalid component indices");
    if (f.dim() != dim_) throw std::invalid_argument("BivectorTestFunction: dimension mismatch");
    if (mu < nu)
        comps_[static_cast<size_t>(slot(mu, nu))] = std::move(f);
    else
        comps_[static_cast<size_t>(slot(mu, nu))] = scale({-1.0, 0.0}, f);
}

std::optional<std::pair<Real, TestFunction>> BivectorTestFunction::signed_component(int mu,
                                                                                    int nu) const {
    if (mu == nu || mu < 0 || nu < 0 || mu >= dim_ || nu >= dim_) return std::nullopt;
    const auto& c = comps_[static_cast<size_t>(slot(std::min(mu, nu), std::max(mu, nu)))];
    if (!c) return std::nullopt;
    return std::make_pair(mu < nu ? 1.0 : -1.0, *c);
}

Complex BivectorTestFunction::spectrum_component(int mu, int nu, const WaveVector& k) const {
    const auto sc = signed_component(mu, nu);
    if (!sc) return {0.0, 0.0};
    return sc->first * spectrum(sc->second, k);
}

Complex em_contraction(const BivectorSpectrumFn& f, const BivectorSpectrumFn& g,
                       const WaveVector& kv) {
    // Contraction signs: the beta index is paired with the opposite
    // signature so the diagonal is >= 0.
    static constexpr Real sign_b[4] = {-1.0, 1.0, 1.0, 1.0};
    const Vec& k = kv.coords;
    Complex ft[4][4], gt[4][4];
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu + 1; nu < 4; ++nu) {
            ft[mu][nu] = f(mu, nu, kv);
            ft[nu][mu] = -ft[mu][nu];
            gt[mu][nu] = g(mu, nu, kv);
            gt[nu][mu] = -gt[mu][nu];
        }
    Complex contraction{0.0, 0.0};
    for (int b = 0; b < 4; ++b) {
        Complex a_b{0.0, 0.0}, b_b{0.0, 0.0};
        for (int mu = 0; mu < 4; ++mu) {
            a_b += k[mu] * ft[mu][b];
            b_b += k[mu] * gt[mu][b];
        }
        contraction += sign_b[b] * std::conj(a_b) * b_b;
    }
    return contraction;
}

Complex em_ip_spectra(const BivectorSpectrumFn& f, const BivectorSpectrumFn& g,
                      const ShellConfig& cfg) {
    cfg.validate();
    if (cfg.dimension != 4) throw std::invalid_argument("em_ip: requires dimension 4");
    if (cfg.mass != 0.0) throw std::invalid_argument("em_ip: requires mass 0");
    const std::vector<ShellNode> nodes = build_shell_nodes(cfg);
    KahanSum sum;
    for (const ShellNode& n : nodes) {
        Vec k(4);
        k[0] = n.omega;
        for (int a = 1; a < 4; ++a) k[a] = n.kspatial[a - 1];
        sum.add((n.weight / (2.0 * n.omega)) * em_contraction(f, g, WaveVector{k}));
    }
    return cfg.hbar * sum.value();
}

Complex em_ip(const BivectorTestFunction& f, const BivectorTestFunction& g,
              const ShellConfig& cfg) {
    auto fs = [&f](int mu, int nu, const WaveVector& k) { return f.spectrum_component(mu, nu, k); };
    auto gs = [&g](int mu, int nu, const WaveVector& k) { return g.spectrum_component(mu, nu, k); };
    return em_ip_spectra(fs, gs, cfg);
}

}  // namespace shellfield
