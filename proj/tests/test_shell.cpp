#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

#include "shellfield/linalg.hpp"
#include "shellfield/shell.hpp"

using namespace shellfield;

namespace {

ShellConfig packet_config() {
    ShellConfig cfg;
    cfg.mass = 1.0;
    cfg.dimension = 2;
    cfg.quadrature.cutoff = 20.0;
    cfg.quadrature.nodes = 320;
    return cfg;
}

TestFunction standard_packet() {
    return TestFunction::gaussian_packet(
        2, {{Complex{1.0, 0.0}, Vec{0.0, 0.0}, Vec{1.0, 1.0}, Vec{0.0, 0.0}}});
}

TestFunction offset_packet() {
    return TestFunction::gaussian_packet(
        2, {{Complex{0.8, 0.4}, Vec{0.5, -1.0}, Vec{0.9, 1.2}, Vec{2.0, 1.0}}});
}

// Independent single-term spectrum for the trapezoid oracle: written from
// the diagonal Gaussian transform pair, not via the library payloads.
struct OracleTerm {
    Complex amp;
    double c0, c1, s0, s1, q0, q1;
};

Complex oracle_spectrum(const OracleTerm& t, double k0, double k1) {
    const double quad = t.s0 * t.s0 * (k0 - t.q0) * (k0 - t.q0) +
                        t.s1 * t.s1 * (k1 - t.q1) * (k1 - t.q1);
    const double phase = k0 * t.c0 - k1 * t.c1;
    return t.amp * kTwoPi * t.s0 * t.s1 * std::exp(-0.5 * quad) *
           Complex{std::cos(phase), std::sin(phase)};
}

// Two-shell trapezoid oracle for single-term packets, Richardson
// extrapolated; sign = +1, -1, or 0 (both shells averaged).
Complex oracle_pairing(const OracleTerm& f, const OracleTerm& g, double mass, int shell_sign,
                       double cut, long n) {
    auto run = [&](long nn) {
        Complex acc{0.0, 0.0};
        const double h = 2.0 * cut / static_cast<double>(nn);
        for (long i = 0; i <= nn; ++i) {
            const double k = -cut + h * static_cast<double>(i);
            const double w = (i == 0 || i == nn) ? 0.5 * h : h;
            const double omega = std::sqrt(k * k + mass * mass);
            Complex v{0.0, 0.0};
            if (shell_sign >= 0)
                v += std::conj(oracle_spectrum(f, omega, k)) * oracle_spectrum(g, omega, k);
            if (shell_sign <= 0)
                v += std::conj(oracle_spectrum(f, -omega, k)) * oracle_spectrum(g, -omega, k);
            if (shell_sign == 0) v *= 0.5;
            acc += w * v / (kTwoPi * 2.0 * omega);
        }
        return acc;
    };
    const Complex coarse = run(n);
    const Complex fine = run(2 * n);
    return fine + (fine - coarse) / 3.0;
}

}  // namespace

TEST_CASE("quantum_ip: golden standard-packet value") {
    const ShellConfig cfg = packet_config();
    const Complex v = quantum_ip(standard_packet(), standard_packet(), cfg);
    CHECK(std::abs(v - 1.3226872821587758) <= 1e-8 * 1.3226872821587758);
    CHECK(std::fabs(v.imag()) < 1e-15);
}

TEST_CASE("quantum_ip: sub-mass carrier misses the shell") {
    const ShellConfig cfg = packet_config();
    // narrow bandwidth (wide envelope) centered at k0 = 0.3 m: the
    // spectrum is negligible on |k0| >= m
    TestFunction f = TestFunction::gaussian_packet(
        2, {{Complex{1.0, 0.0}, Vec{0.0, 0.0}, Vec{10.0, 10.0}, Vec{0.3, 0.0}}});
    const Complex v = quantum_ip(f, f, cfg);
    // normalize by the position-space norm scale of the packet
    const double norm_scale = kPi * 10.0 * 10.0;  // prod sqrt(pi) sigma
    CHECK(std::abs(v) < 1e-8 * norm_scale);
}

TEST_CASE("quantum_ip: positive diagonal") {
    const ShellConfig cfg = packet_config();
    for (const TestFunction& f : {standard_packet(), offset_packet()}) {
        const Complex v = quantum_ip(f, f, cfg);
        CHECK(v.real() > 0.0);
        CHECK(std::fabs(v.imag()) <= 1e-15 * v.real());
    }
}

TEST_CASE("quantum_ip / classical_ip: trapezoid oracle on single-term packets") {
    const ShellConfig cfg = packet_config();
    const OracleTerm of{Complex{1.0, 0.0}, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0};
    const OracleTerm og{Complex{0.8, 0.4}, 0.5, -1.0, 0.9, 1.2, 2.0, 1.0};
    TestFunction f = standard_packet();
    TestFunction g = offset_packet();

    const Complex q = quantum_ip(f, g, cfg);
    const Complex oq = oracle_pairing(of, og, 1.0, +1, 20.0, 4000);
    CHECK(std::abs(q - oq) <= 1e-8 * std::abs(oq));

    const Complex c = classical_ip(f, g, cfg);
    const Complex oc = oracle_pairing(of, og, 1.0, 0, 20.0, 4000);
    CHECK(std::abs(c - oc) <= 1e-8 * std::abs(oc));
}

TEST_CASE("classical_ip: equals quantum on real functions") {
    const ShellConfig cfg = packet_config();
    TestFunction f = standard_packet();
    const Complex q = quantum_ip(f, f, cfg);
    const Complex c = classical_ip(f, f, cfg);
    CHECK(std::abs(c - q) <= 1e-10 * std::abs(q));
}

TEST_CASE("classical_ip: half-sum identity") {
    const ShellConfig cfg = packet_config();
    TestFunction f = offset_packet();
    TestFunction g = standard_packet();
    const Complex c = classical_ip(f, g, cfg);
    const Complex rhs =
        0.5 * (quantum_ip(f, g, cfg) + quantum_ip(conjugate(g), conjugate(f), cfg));
    CHECK(std::abs(c - rhs) <= 1e-10 * std::max(1.0, std::abs(c)));
}

TEST_CASE("property: hermiticity at the quadrature level") {
    const ShellConfig cfg = packet_config();
    TestFunction f = offset_packet();
    TestFunction g = standard_packet();
    for (KernelKind kind : {KernelKind::Quantum, KernelKind::Classical}) {
        const Complex a = pairing(f, g, kind, cfg);
        const Complex b = pairing(g, f, kind, cfg);
        CHECK(std::abs(a - std::conj(b)) <= 1e-14 * std::abs(a));
    }
}

TEST_CASE("property: sesquilinearity") {
    const ShellConfig cfg = packet_config();
    TestFunction f1 = standard_packet();
    TestFunction f2 = offset_packet();
    TestFunction g = TestFunction::gaussian_packet(
        2, {{Complex{0.3, -0.6}, Vec{-0.2, 0.4}, Vec{1.3, 0.7}, Vec{-1.0, 2.0}}});
    const Complex alpha{0.7, -1.1};
    const Complex lhs = quantum_ip(add(scale(alpha, f1), f2), g, cfg);
    const Complex rhs = std::conj(alpha) * quantum_ip(f1, g, cfg) + quantum_ip(f2, g, cfg);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    // linear in the second slot
    const Complex lhs2 = quantum_ip(g, add(scale(alpha, f1), f2), cfg);
    const Complex rhs2 = alpha * quantum_ip(g, f1, cfg) + quantum_ip(g, f2, cfg);
    CHECK(std::abs(lhs2 - rhs2) <= 1e-12 * std::max(1.0, std::abs(rhs2)));
}

TEST_CASE("rules: trapezoid agrees with composite gauss") {
    ShellConfig gl = packet_config();
    ShellConfig tr = packet_config();
    tr.quadrature.rule = QuadratureRule::Trapezoid;
    tr.quadrature.nodes = 481;
    TestFunction f = standard_packet();
    TestFunction g = offset_packet();
    const Complex a = quantum_ip(f, g, gl);
    const Complex b = quantum_ip(f, g, tr);
    CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
}

TEST_CASE("massless d=2: finite with nodes straddling the 1/|k| singularity") {
    ShellConfig cfg;
    cfg.mass = 0.0;
    cfg.dimension = 2;
    cfg.quadrature.cutoff = 20.0;
    cfg.quadrature.nodes = 512;
    TestFunction f = TestFunction::gaussian_packet(
        2, {{Complex{1.0, 0.0}, Vec{0.0, 0.0}, Vec{1.0, 1.0}, Vec{2.0, 2.0}}});
    const Complex v = quantum_ip(f, f, cfg);
    CHECK(std::isfinite(v.real()));
    CHECK(v.real() > 0.0);
    // documented accuracy caveat: the integrable 1/|k| endpoint limits the
    // composite rule, so node refinement drifts at the 1e-3 level
    ShellConfig fine = cfg;
    fine.quadrature.nodes = 2048;
    const Complex vf = quantum_ip(f, f, fine);
    CHECK(std::abs(v - vf) <= 5e-3 * std::abs(vf));
}

TEST_CASE("massless d=2 trapezoid: node lattice avoids k = 0") {
    ShellConfig cfg;
    cfg.mass = 0.0;
    cfg.dimension = 2;
    cfg.quadrature.cutoff = 20.0;
    cfg.quadrature.rule = QuadratureRule::Trapezoid;
    cfg.quadrature.nodes = 512;  // even request; the rule bumps it to odd
    for (const ShellNode& n : build_shell_nodes(cfg)) CHECK(n.kspatial[0] != 0.0);
    TestFunction f = TestFunction::gaussian_packet(
        2, {{Complex{1.0, 0.0}, Vec{0.0, 0.0}, Vec{1.0, 1.0}, Vec{2.0, 2.0}}});
    const Complex v = quantum_ip(f, f, cfg);
    CHECK(std::isfinite(v.real()));
    CHECK(v.real() > 0.0);
}

TEST_CASE("errors: cutoff check, dimension checks, config validation") {
    ShellConfig cfg = packet_config();
    // on-shell carrier just beyond the cutoff: the shell samples still see
    // a non-negligible spectrum at the box edge
    TestFunction hot = TestFunction::gaussian_packet(
        2, {{Complex{1.0, 0.0}, Vec{0.0, 0.0}, Vec{1.0, 1.0}, Vec{22.0, 22.0}}});
    CHECK_THROWS_AS(quantum_ip(hot, hot, cfg), QuadratureError);

    TestFunction f3 = TestFunction::gaussian_packet(
        3, {{Complex{1.0, 0.0}, Vec{0.0, 0.0, 0.0}, Vec{1.0, 1.0, 1.0}, Vec{0.0, 0.0, 0.0}}});
    CHECK_THROWS_AS(quantum_ip(f3, f3, cfg), std::invalid_argument);

    ShellConfig bad = cfg;
    bad.quadrature.nodes = 8;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.mass = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.quadrature.cutoff = 3.0;  // must exceed 4 * mass
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(pairing(standard_packet(), standard_packet(), KernelKind::EMQuantum, cfg),
                    std::invalid_argument);
}

TEST_CASE("commutator_kernel: classical kernel annihilates all commutators") {
    const ShellConfig cfg = packet_config();
    std::mt19937_64 prng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        TestFunction f = TestFunction::gaussian_packet(
            2, {{Complex{u(prng), u(prng)}, Vec{u(prng), u(prng)},
                 Vec{1.0 + 0.4 * u(prng), 1.0 + 0.4 * u(prng)}, Vec{2 * u(prng), 2 * u(prng)}}});
        TestFunction g = TestFunction::gaussian_packet(
            2, {{Complex{u(prng), u(prng)}, Vec{u(prng), u(prng)},
                 Vec{1.0 + 0.4 * u(prng), 1.0 + 0.4 * u(prng)}, Vec{2 * u(prng), 2 * u(prng)}}});
        const Complex c = commutator_kernel(f, g, KernelKind::Classical, cfg);
        const double scale = std::max(std::abs(quantum_ip(conjugate(f), f, cfg)),
                                      std::abs(quantum_ip(conjugate(g), g, cfg)));
        CHECK(std::abs(c) <= 1e-12 * scale);
    }
}

TEST_CASE("commutator_kernel: microcausality for compact bumps") {
    ShellConfig cfg;
    cfg.mass = 1.0;
    cfg.dimension = 2;
    cfg.quadrature.cutoff = 130.0;
    cfg.quadrature.nodes = 1536;
    TestFunction f = TestFunction::mollifier(Vec{0.0, 0.0}, Vec{1.0, 1.0}, {1.0, 0.0}, 141);
    TestFunction g_space = translate(f, SpacetimePoint{Vec{0.0, 3.0}});
    TestFunction g_time = translate(f, SpacetimePoint{Vec{3.0, 0.0}});
    const Complex cs = commutator_kernel(f, g_space, KernelKind::Quantum, cfg);
    const Complex ct = commutator_kernel(f, g_time, KernelKind::Quantum, cfg);
    CHECK(std::abs(ct) > 1e3 * std::abs(cs));
    CHECK(std::abs(cs) <= 1e-4 * std::abs(ct));
    // zero offset: antisymmetry
    const Complex c0 = commutator_kernel(f, f, KernelKind::Quantum, cfg);
    CHECK(std::abs(c0) <= 1e-14 * std::abs(ct));
}

TEST_CASE("spacelike supports: quantum and classical pairings agree") {
    ShellConfig cfg;
    cfg.mass = 1.0;
    cfg.dimension = 2;
    cfg.quadrature.cutoff = 130.0;
    cfg.quadrature.nodes = 1536;
    TestFunction f = TestFunction::mollifier(Vec{0.0, 0.0}, Vec{1.0, 1.0}, {1.0, 0.0}, 141);
    TestFunction g_space = translate(f, SpacetimePoint{Vec{0.0, 3.0}});
    TestFunction g_time = translate(f, SpacetimePoint{Vec{3.0, 0.0}});
    const Complex ds = quantum_ip(f, g_space, cfg) - classical_ip(f, g_space, cfg);
    const Complex dt = quantum_ip(f, g_time, cfg) - classical_ip(f, g_time, cfg);
    CHECK(std::abs(ds) <= 1e-4 * std::abs(dt));
}

TEST_CASE("mixed packet/grid pairings are hermitian and finite") {
    // the bump's slowly decaying spectrum sets the cutoff requirement
    ShellConfig cfg = packet_config();
    cfg.quadrature.cutoff = 130.0;
    cfg.quadrature.nodes = 1536;
    TestFunction p = standard_packet();
    TestFunction b = TestFunction::mollifier(Vec{0.0, 0.0}, Vec{1.0, 1.0}, {1.0, 0.0}, 141);
    for (KernelKind kind : {KernelKind::Quantum, KernelKind::Classical}) {
        const Complex a = pairing(p, b, kind, cfg);
        CHECK(std::isfinite(a.real()));
        CHECK(std::abs(a) > 0.0);
        CHECK(std::abs(a - std::conj(pairing(b, p, kind, cfg))) <= 1e-14 * std::abs(a));
    }
}

TEST_CASE("concurrent pairing calls agree with the serial value") {
    const ShellConfig cfg = packet_config();
    TestFunction f = standard_packet();
    TestFunction g = offset_packet();
    const Complex expect = quantum_ip(f, g, cfg);
    std::array<Complex, 8> results{};
    std::vector<std::thread> pool;
    for (size_t t = 0; t < results.size(); ++t)
        pool.emplace_back([&, t] { results[t] = quantum_ip(f, g, cfg); });
    for (std::thread& t : pool) t.join();
    for (const Complex& v : results) CHECK(v == expect);
}

TEST_CASE("d=3: pairings finite, hermitian, translation invariant") {
    ShellConfig cfg;
    cfg.mass = 1.0;
    cfg.dimension = 3;
    cfg.quadrature.cutoff = 12.0;
    cfg.quadrature.nodes = 96;
    TestFunction f = TestFunction::gaussian_packet(
        3, {{Complex{1.0, 0.0}, Vec{0.0, 0.0, 0.0}, Vec{1.0, 1.0, 1.0}, Vec{0.0, 0.0, 0.0}}});
    TestFunction g = TestFunction::gaussian_packet(
        3, {{Complex{0.5, 0.2}, Vec{0.3, -0.4, 0.6}, Vec{1.1, 0.9, 1.2}, Vec{1.0, 0.5, -0.8}}});
    const Complex q = quantum_ip(f, g, cfg);
    CHECK(std::isfinite(q.real()));
    CHECK(std::abs(q - std::conj(quantum_ip(g, f, cfg))) <= 1e-14 * std::abs(q));
    const SpacetimePoint a{Vec{0.5, -0.3, 0.7}};
    const Complex moved = quantum_ip(translate(f, a), translate(g, a), cfg);
    CHECK(std::abs(moved - q) <= 1e-10 * std::abs(q));
    // classical two-shell identity holds in any dimension
    const Complex c = classical_ip(f, g, cfg);
    const Complex qt = quantum_ip(time_reverse(f), time_reverse(g), cfg);
    CHECK(std::abs(qt + q - 2.0 * c) <= 1e-12 * std::abs(c));
}

TEST_CASE("d=4: massive scalar pairing sane at tensor quadrature") {
    ShellConfig cfg;
    cfg.mass = 1.0;
    cfg.dimension = 4;
    cfg.quadrature.cutoff = 6.0;
    cfg.quadrature.nodes = 48;
    TestFunction f = TestFunction::gaussian_packet(
        4, {{Complex{1.0, 0.0}, Vec{0.0, 0.0, 0.0, 0.0}, Vec{1.0, 1.0, 1.0, 1.0},
             Vec{0.0, 0.0, 0.0, 0.0}}});
    const Complex q = quantum_ip(f, f, cfg);
    CHECK(q.real() > 0.0);
    CHECK(std::fabs(q.imag()) <= 1e-14 * q.real());
    const Complex c = classical_ip(f, f, cfg);
    CHECK(std::abs(c - q) <= 1e-10 * std::abs(q));  // real mode
    // node-count refinement stays put (smooth integrand, spectral rule)
    ShellConfig fine = cfg;
    fine.quadrature.nodes = 64;
    CHECK(std::abs(quantum_ip(f, f, fine) - q) <= 1e-9 * std::abs(q));
}

TEST_CASE("gram positivity on a small packet set") {
    const ShellConfig cfg = packet_config();
    std::vector<TestFunction> modes = {standard_packet(), offset_packet(),
                                       TestFunction::gaussian_packet(
                                           2, {{Complex{0.2, 0.9}, Vec{-0.8, 0.2},
                                                Vec{1.1, 0.6}, Vec{0.5, -1.5}}})};
    const int m = static_cast<int>(modes.size());
    std::vector<Complex> gmat(static_cast<size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            gmat[static_cast<size_t>(i) * m + j] =
                quantum_ip(modes[static_cast<size_t>(i)], modes[static_cast<size_t>(j)], cfg);
    const SymEigen eig = jacobi_eigen(hermitian_embedding(gmat, m), 2 * m);
    double trace = 0.0;
    for (int i = 0; i < m; ++i) trace += gmat[static_cast<size_t>(i) * m + i].real();
    CHECK(eig.values.front() >= -1e-10 * trace);
}

// ------------------------------------------------------------- EM ----

namespace {

ShellConfig em_config() {
    ShellConfig cfg;
    cfg.mass = 0.0;
    cfg.hbar = 1.0;
    cfg.dimension = 4;
    cfg.quadrature.cutoff = 8.0;
    cfg.quadrature.nodes = 32;
    return cfg;
}

// Brute-force index-sum oracle: sum_{mu nu alpha beta} with explicit
// metric factors and the same diagonal-positivity sign convention.
Complex oracle_em_contraction(const BivectorSpectrumFn& f, const BivectorSpectrumFn& g,
                              const WaveVector& kv) {
    const Vec& k = kv.coords;
    auto eta = [](int a, int b) { return a != b ? 0.0 : (a == 0 ? 1.0 : -1.0); };
    Complex acc{0.0, 0.0};
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
            for (int alpha = 0; alpha < 4; ++alpha)
                for (int beta = 0; beta < 4; ++beta)
                    acc += std::conj(f(mu, beta, kv)) * k[mu] * k[nu] * g(nu, alpha, kv) *
                           (-eta(alpha, beta));
    return acc;
}

BivectorSpectrumFn gauge_spectrum(const Vec& a) {
    return [a](int mu, int nu, const WaveVector& kv) {
        const Vec klow = eta_apply(kv.coords);  // k_mu
        const double s = std::exp(-0.05 * dot(kv.coords, kv.coords));
        return Complex{(klow[mu] * a[nu] - klow[nu] * a[mu]) * s, 0.0};
    };
}

BivectorSpectrumFn constant_spectrum(const Vec& a, const Vec& b) {
    return [a, b](int mu, int nu, const WaveVector& kv) {
        const double s = std::exp(-0.05 * dot(kv.coords, kv.coords));
        return Complex{(a[mu] * b[nu] - a[nu] * b[mu]) * s, 0.0};
    };
}

}  // namespace

TEST_CASE("em: contraction matches the brute-force index-sum oracle") {
    const Vec a{0.3, 1.0, -0.7, 0.4};
    const Vec b{1.0, 0.2, 0.5, -0.9};
    const BivectorSpectrumFn F = constant_spectrum(a, b);
    const BivectorSpectrumFn G = gauge_spectrum(b);
    std::mt19937_64 prng(99);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int rep = 0; rep < 200; ++rep) {
        Vec k(4);
        k[1] = u(prng);
        k[2] = u(prng);
        k[3] = u(prng);
        k[0] = std::sqrt(k[1] * k[1] + k[2] * k[2] + k[3] * k[3]);
        const WaveVector kv{k};
        const Complex impl = em_contraction(F, G, kv);
        const Complex oracle = oracle_em_contraction(F, G, kv);
        CHECK(std::abs(impl - oracle) <= 1e-10 * std::max(1.0, std::abs(oracle)));
    }
}

TEST_CASE("em: pure-gauge spectra pair to zero on the shell") {
    const ShellConfig cfg = em_config();
    const Vec a{0.5, 1.0, -0.3, 0.8};
    const Vec b{1.0, 0.2, 0.5, -0.9};
    const Complex null_value = em_ip_spectra(gauge_spectrum(a), gauge_spectrum(a), cfg);
    const Complex control =
        em_ip_spectra(constant_spectrum(a, b), constant_spectrum(a, b), cfg);
    CHECK(std::abs(control) > 0.0);
    CHECK(std::abs(null_value) <= 1e-8 * std::abs(control));
}

TEST_CASE("em: electric-type bivector packets, hermitian nonnegative diagonal") {
    const ShellConfig cfg = em_config();
    TestFunction comp = TestFunction::gaussian_packet(
        4, {{Complex{1.0, 0.0}, Vec{0.0, 0.0, 0.0, 0.0}, Vec{1.0, 1.0, 1.0, 1.0},
             Vec{0.0, 2.0, 0.0, 0.0}}});
    BivectorTestFunction f(4);
    for (int i = 1; i < 4; ++i) f.set_component(0, i, comp);
    const Complex diag = em_ip(f, f, cfg);
    CHECK(diag.real() >= 0.0);
    CHECK(std::fabs(diag.imag()) <= 1e-12 * std::max(1.0, diag.real()));

    // oracle agreement on the full quadrature
    auto fs = [&f](int mu, int nu, const WaveVector& k) {
        return f.spectrum_component(mu, nu, k);
    };
    const std::vector<ShellNode> nodes = build_shell_nodes(cfg);
    Complex oracle{0.0, 0.0};
    for (const ShellNode& n : nodes) {
        Vec k(4);
        k[0] = n.omega;
        for (int i = 1; i < 4; ++i) k[i] = n.kspatial[i - 1];
        oracle += (n.weight / (2.0 * n.omega)) * oracle_em_contraction(fs, fs, WaveVector{k});
    }
    oracle *= cfg.hbar;
    CHECK(std::abs(diag - oracle) <= 1e-10 * std::abs(oracle));
}

TEST_CASE("em: errors on mass and dimension") {
    ShellConfig cfg = em_config();
    BivectorTestFunction f(4);
    cfg.mass = 1.0;
    CHECK_THROWS_AS(em_ip(f, f, cfg), std::invalid_argument);
    CHECK_THROWS_AS(BivectorTestFunction(3), std::invalid_argument);
    BivectorTestFunction g(4);
    TestFunction comp = TestFunction::gaussian_packet(
        4, {{Complex{1.0, 0.0}, Vec{0.0, 0.0, 0.0, 0.0}, Vec{1.0, 1.0, 1.0, 1.0},
             Vec{0.0, 0.0, 0.0, 0.0}}});
    CHECK_THROWS_AS(g.set_component(1, 1, comp), std::invalid_argument);
}

TEST_CASE("em: antisymmetric component storage") {
    BivectorTestFunction f(4);
    TestFunction comp = TestFunction::gaussian_packet(
        4, {{Complex{1.0, 0.0}, Vec{0.0, 0.0, 0.0, 0.0}, Vec{1.0, 1.0, 1.0, 1.0},
             Vec{0.0, 0.0, 0.0, 0.0}}});
    f.set_component(0, 1, comp);
    const WaveVector k{Vec{1.0, 0.5, -0.3, 0.2}};
    CHECK(std::abs(f.spectrum_component(0, 1, k) + f.spectrum_component(1, 0, k)) == 0.0);
    CHECK(f.spectrum_component(2, 3, k) == Complex{0.0, 0.0});
    CHECK(f.spectrum_component(1, 1, k) == Complex{0.0, 0.0});
}
