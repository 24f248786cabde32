// Acceptance suite: every library-level claim with its tolerance, one
// pass/fail line per criterion. Exit code = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "shellfield/fock.hpp"
#include "shellfield/linalg.hpp"
#include "shellfield/rf.hpp"
#include "shellfield/shell.hpp"

using namespace shellfield;

namespace {

// Golden constant from the independent trapezoid/Richardson oracle
// (tests/oracle_ip.cpp), committed before the library quadrature existed.
constexpr double kGoldenStandardPacketNorm = 1.3226872821587758;

ShellConfig packet_config() {
    ShellConfig cfg;
    cfg.mass = 1.0;
    cfg.dimension = 2;
    cfg.quadrature.cutoff = 20.0;
    cfg.quadrature.nodes = 320;
    return cfg;
}

ShellConfig bump_config() {
    ShellConfig cfg;
    cfg.mass = 1.0;
    cfg.dimension = 2;
    cfg.quadrature.cutoff = 130.0;
    cfg.quadrature.nodes = 1792;
    return cfg;
}

struct PacketGen {
    std::mt19937_64 prng;
    explicit PacketGen(std::uint64_t seed) : prng(seed) {}
    double uni(double lo, double hi) {
        std::uniform_real_distribution<double> d(lo, hi);
        return d(prng);
    }
    TestFunction complex_packet(int max_terms = 2) {
        std::vector<TestFunction::PacketTermSpec> specs;
        const int terms = 1 + static_cast<int>(prng() % static_cast<std::uint64_t>(max_terms));
        for (int t = 0; t < terms; ++t) {
            TestFunction::PacketTermSpec s;
            s.amplitude = {uni(-1, 1), uni(-1, 1)};
            s.center = Vec{uni(-2, 2), uni(-2, 2)};
            s.widths = Vec{uni(0.6, 1.6), uni(0.6, 1.6)};
            s.carrier = Vec{uni(-3, 3), uni(-3, 3)};
            specs.push_back(std::move(s));
        }
        return TestFunction::gaussian_packet(2, specs);
    }
    TestFunction real_packet() {
        TestFunction::PacketTermSpec s;
        s.amplitude = {uni(0.3, 1.0), 0.0};
        s.center = Vec{uni(-1, 1), uni(-1, 1)};
        s.widths = Vec{uni(0.8, 1.5), uni(0.8, 1.5)};
        s.carrier = Vec{0.0, 0.0};
        return TestFunction::gaussian_packet(2, {s});
    }
};

std::string detail_ratio(const char* label, double value, double limit) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << label << "=" << value << " (limit " << limit << ")";
    return os.str();
}

using CriterionResult = std::pair<bool, std::string>;

// 1. Classical-kernel commutators vanish for arbitrary complex packets.
CriterionResult classical_commutator_identity() {
    const ShellConfig cfg = packet_config();
    PacketGen gen(101);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        TestFunction f = gen.complex_packet();
        TestFunction g = gen.complex_packet();
        const Complex comm = field_commutator(f, g, KernelKind::Classical, cfg);
        const double scale =
            std::max(std::abs(pairing(conjugate(f), f, KernelKind::Classical, cfg)),
                     std::abs(pairing(conjugate(g), g, KernelKind::Classical, cfg)));
        worst = std::max(worst, std::abs(comm) / scale);
    }
    return {worst <= 1e-12, detail_ratio("max|comm|/scale", worst, 1e-12)};
}

// 2. Quantum microcausality for compactly supported bumps.
CriterionResult quantum_microcausality() {
    const ShellConfig cfg = bump_config();
    TestFunction f = TestFunction::mollifier(Vec{0.0, 0.0}, Vec{1.0, 1.0}, {1.0, 0.0}, 141);
    double spacelike_max = 0.0;
    for (double dx : {3.0, 5.0, 8.0}) {
        TestFunction g = translate(f, SpacetimePoint{Vec{0.0, dx}});
        spacelike_max = std::max(
            spacelike_max, std::abs(commutator_kernel(f, g, KernelKind::Quantum, cfg)));
    }
    TestFunction gt = translate(f, SpacetimePoint{Vec{5.0, 0.0}});
    const double timelike = std::abs(commutator_kernel(f, gt, KernelKind::Quantum, cfg));
    const bool pass = spacelike_max <= 1e-6 * timelike && timelike > 1e3 * spacelike_max;
    return {pass, detail_ratio("spacelike/timelike", spacelike_max / timelike, 1e-6)};
}

// 3. Vacuum moments match (2k-1)!! (f*,f)^k; odd moments vanish.
CriterionResult vacuum_moments() {
    const ShellConfig cfg = packet_config();
    PacketGen gen(303);
    double worst_even = 0.0, worst_odd = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
        TestFunction f = gen.real_packet();
        for (KernelKind kind : {KernelKind::Quantum, KernelKind::Classical}) {
            const double var = field_moment(f, 2, kind, cfg).real();
            double pairings = 1.0;
            for (int k = 1; k <= 5; ++k) {
                pairings *= 2.0 * k - 1.0;
                const Complex m = field_moment(f, 2 * k, kind, cfg);
                const double closed = pairings * std::pow(var, k);
                worst_even = std::max(worst_even, std::abs(m - closed) / closed);
                if (2 * k - 1 <= 11)
                    worst_odd =
                        std::max(worst_odd, std::abs(field_moment(f, 2 * k - 1, kind, cfg)));
            }
        }
    }
    const bool pass = worst_even <= 1e-10 && worst_odd <= 1e-12;
    return {pass, detail_ratio("max even rel", worst_even, 1e-10) + ", " +
                      detail_ratio("max odd abs", worst_odd, 1e-12)};
}

// 4. Wick engine equals exhaustive pairing enumeration on all words of
// length <= 6 over 3 labels.
Complex wick_enumeration(const std::vector<OperatorSymbol>& word, PairingTable& table) {
    if (word.empty()) return {1.0, 0.0};
    if (word.front().flavor == OpFlavor::Create) return {0.0, 0.0};
    Complex acc{0.0, 0.0};
    for (size_t j = 1; j < word.size(); ++j) {
        if (word[j].flavor != OpFlavor::Create) continue;
        std::vector<OperatorSymbol> rest;
        rest.reserve(word.size() - 2);
        for (size_t i = 1; i < word.size(); ++i)
            if (i != j) rest.push_back(word[i]);
        acc += table.ip(word[j].label, word.front().label) * wick_enumeration(rest, table);
    }
    return acc;
}

CriterionResult wick_oracle_equivalence() {
    const ShellConfig cfg = packet_config();
    PacketGen gen(404);
    const std::vector<TestFunction> labels = {gen.complex_packet(), gen.complex_packet(),
                                              gen.complex_packet()};
    PairingTable table(KernelKind::Quantum, cfg);
    double ipscale = 1.0;
    for (const TestFunction& l : labels)
        ipscale = std::max(ipscale, std::abs(table.ip(l, l)));
    double worst = 0.0;
    for (int len = 0; len <= 6; ++len) {
        std::vector<int> digits(static_cast<size_t>(len), 0);
        for (;;) {
            std::vector<OperatorSymbol> word;
            word.reserve(static_cast<size_t>(len));
            for (int d : digits) {
                const TestFunction& l = labels[static_cast<size_t>(d % 3)];
                word.push_back(d < 3 ? annihilate(l) : create(l));
            }
            OperatorExpr e = OperatorExpr::identity();
            for (const OperatorSymbol& s : word) e = e * OperatorExpr::symbol(s);
            const Complex engine = vev(e, table);
            const Complex oracle = wick_enumeration(word, table);
            const double scale = std::max(1.0, std::pow(ipscale, len / 2.0));
            worst = std::max(worst, std::abs(engine - oracle) / scale);
            int pos = len - 1;
            for (; pos >= 0; --pos) {
                if (++digits[static_cast<size_t>(pos)] < 6) break;
                digits[static_cast<size_t>(pos)] = 0;
            }
            if (pos < 0) break;
        }
        if (len == 0) continue;
    }
    return {worst <= 1e-12, detail_ratio("max|engine-oracle|/scale", worst, 1e-12)};
}

// 5. Resonance probabilities: normalization, vacuum, orthogonality, range.
CriterionResult resonance_probabilities() {
    const ShellConfig cfg = packet_config();
    PacketGen gen(505);
    TestFunction f = gen.complex_packet();
    const double diag = resonance_probability(f, FockState::one_particle(f),
                                              KernelKind::Quantum, cfg);
    if (std::fabs(diag - 1.0) > 1e-12)
        return {false, detail_ratio("|p(f,f)-1|", std::fabs(diag - 1.0), 1e-12)};
    if (resonance_probability(f, FockState::vacuum(), KernelKind::Quantum, cfg) != 0.0)
        return {false, "vacuum probability not exactly zero"};

    const Complex ipfg = pairing(f, f, KernelKind::Quantum, cfg);
    PacketGen gen2(506);
    TestFunction g = gen2.complex_packet();
    const Complex c = pairing(f, g, KernelKind::Quantum, cfg) / ipfg;
    TestFunction g_perp = subtract(g, scale(c, f));
    const double p_perp =
        resonance_probability(f, FockState::one_particle(g_perp), KernelKind::Quantum, cfg);
    if (p_perp > 1e-10) return {false, detail_ratio("p(f, g_perp)", p_perp, 1e-10)};

    double lo = 0.0, hi = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        TestFunction a = gen.complex_packet();
        TestFunction b = gen.complex_packet();
        const double p =
            resonance_probability(a, FockState::one_particle(b), KernelKind::Quantum, cfg);
        lo = std::min(lo, p);
        hi = std::max(hi, p - 1.0);
    }
    const bool pass = lo >= -1e-12 && hi <= 1e-12;
    return {pass, detail_ratio("range excess", std::max(-lo, hi), 1e-12)};
}

// 6. Exactly a factor of two between the kernels on projected packets.
CriterionResult factor_of_two() {
    const ShellConfig cfg = packet_config();
    PacketGen gen(606);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        TestFunction f = positive_frequency_projection(gen.complex_packet());
        TestFunction g = positive_frequency_projection(gen.complex_packet());
        const Complex q = quantum_ip(f, g, cfg);
        const Complex c = classical_ip(f, g, cfg);
        if (std::abs(q) == 0.0) continue;
        worst = std::max(worst, std::abs(q - 2.0 * c) / std::abs(q));
    }
    return {worst <= 1e-6, detail_ratio("max|q-2c|/|q|", worst, 1e-6)};
}

// 7. Symmetry suite: Poincare invariance, time-reversal asymmetry,
// two-shell identity.
CriterionResult symmetry_suite() {
    ShellConfig cfg = packet_config();
    cfg.quadrature.cutoff = 40.0;
    cfg.quadrature.nodes = 896;
    PacketGen gen(707);
    TestFunction f = TestFunction::gaussian_packet(
        2, {{Complex{1.0, 0.0}, Vec{0.0, 0.0}, Vec{1.0, 1.0}, Vec{0.0, 0.0}}});
    TestFunction g = TestFunction::gaussian_packet(
        2, {{Complex{0.6, -0.3}, Vec{0.4, 0.7}, Vec{1.1, 0.9}, Vec{1.5, -0.5}}});
    const SpacetimePoint a{Vec{0.8, -0.5}};

    double worst_poincare = 0.0;
    for (KernelKind kind : {KernelKind::Quantum, KernelKind::Classical}) {
        const Complex base = pairing(f, g, kind, cfg);
        const double b = std::abs(base);
        worst_poincare = std::max(
            worst_poincare, std::abs(pairing(translate(f, a), translate(g, a), kind, cfg) - base) / b);
        worst_poincare = std::max(
            worst_poincare,
            std::abs(pairing(boost(f, 1.0), boost(g, 1.0), kind, cfg) - base) / b);
        worst_poincare = std::max(
            worst_poincare,
            std::abs(pairing(parity_reverse(f), parity_reverse(g), kind, cfg) - base) / b);
    }
    if (worst_poincare > 1e-8)
        return {false, detail_ratio("poincare rel change", worst_poincare, 1e-8)};

    const Complex c = classical_ip(f, g, cfg);
    const double classical_t =
        std::abs(classical_ip(time_reverse(f), time_reverse(g), cfg) - c) / std::abs(c);
    if (classical_t > 1e-10)
        return {false, detail_ratio("classical T change", classical_t, 1e-10)};

    TestFunction w = TestFunction::gaussian_packet(
        2, {{Complex{1.0, 0.0}, Vec{0.0, 0.0}, Vec{1.0, 1.0}, Vec{3.0, 0.0}}});
    const Complex qw = quantum_ip(w, w, cfg);
    const Complex qtw = quantum_ip(time_reverse(w), time_reverse(w), cfg);
    const double witness_change = std::abs(qtw - qw) / std::abs(qw);
    if (witness_change < 0.5)
        return {false, detail_ratio("witness change", witness_change, 0.5)};

    const Complex q = quantum_ip(f, g, cfg);
    const Complex qt = quantum_ip(time_reverse(f), time_reverse(g), cfg);
    const double two_shell = std::abs(qt + q - 2.0 * c) / std::abs(c);
    const bool pass = two_shell <= 1e-9;
    return {pass, detail_ratio("two-shell resid", two_shell, 1e-9) + ", " +
                      detail_ratio("witness change", witness_change, 0.5)};
}

// 8. Quantum and classical pairings agree for spacelike supports.
CriterionResult spacelike_kernel_agreement() {
    const ShellConfig cfg = bump_config();
    TestFunction f = TestFunction::mollifier(Vec{0.0, 0.0}, Vec{1.0, 1.0}, {1.0, 0.0}, 141);
    double spacelike_max = 0.0;
    for (double dx : {3.0, 5.0}) {
        TestFunction g = translate(f, SpacetimePoint{Vec{0.0, dx}});
        spacelike_max =
            std::max(spacelike_max, std::abs(quantum_ip(f, g, cfg) - classical_ip(f, g, cfg)));
    }
    TestFunction gt = translate(f, SpacetimePoint{Vec{5.0, 0.0}});
    const double timelike = std::abs(quantum_ip(f, gt, cfg) - classical_ip(f, gt, cfg));
    const double ratio = spacelike_max / timelike;
    return {ratio <= 1e-6, detail_ratio("spacelike/timelike", ratio, 1e-6)};
}

// 9. Monte Carlo moments match the engine; seeds and threads reproduce
// bit-exactly.
CriterionResult monte_carlo_consistency() {
    const ShellConfig cfg = packet_config();
    TestFunction f = TestFunction::gaussian_packet(
        2, {{Complex{1.0, 0.0}, Vec{0.0, 0.0}, Vec{1.0, 1.0}, Vec{0.0, 0.0}}});
    ModeSet ms;
    ms.modes.push_back({"f", f});
    const GramMatrix gm = gram(ms, KernelKind::Classical, cfg);

    const SampleBatch b1 = sample(gm, 100000, 909);
    const SampleBatch b2 = sample(gm, 100000, 909);
    if (!(b1.draws == b2.draws)) return {false, "same-seed batches differ"};
    const SampleBatch b4 = sample(gm, 100000, 909, 4);
    if (!(b1.draws == b4.draws)) return {false, "thread count changed the draws"};

    double worst_z = 0.0;
    bool ok = false;
    for (std::uint64_t attempt = 0; attempt < 2 && !ok; ++attempt) {
        const SampleBatch batch = sample(gm, 100000, 909 + attempt);
        const auto moments = empirical_moments(batch, 0, {2, 4, 6});
        worst_z = 0.0;
        for (const MomentEstimate& m : moments) {
            const double pred = field_moment(f, m.order, KernelKind::Classical, cfg).real();
            worst_z = std::max(worst_z, std::fabs(m.value - pred) / m.stderr_jackknife);
        }
        ok = worst_z <= 3.0;
    }
    return {ok, detail_ratio("max |z|", worst_z, 3.0)};
}

// 10. Gram matrices of random mode sets stay PSD under both kernels.
CriterionResult gram_psd() {
    const ShellConfig cfg = packet_config();
    PacketGen gen(1010);
    double worst = 0.0;
    for (int set = 0; set < 10; ++set) {
        ModeSet ms;
        for (int i = 0; i < 8; ++i)
            ms.modes.push_back({"r" + std::to_string(i), gen.real_packet()});
        for (int i = 0; i < 8; ++i)
            ms.modes.push_back({"c" + std::to_string(i), gen.complex_packet(1)});
        for (KernelKind kind : {KernelKind::Quantum, KernelKind::Classical}) {
            const GramMatrix gm = gram(ms, kind, cfg);
            worst = std::max(worst, -gm.min_eigenvalue() / gm.trace());
        }
    }
    return {worst <= 1e-10, detail_ratio("max -min_eig/trace", worst, 1e-10)};
}

// 11. Library quadrature against the frozen independent-oracle constant.
CriterionResult quadrature_oracle() {
    const ShellConfig cfg = packet_config();
    TestFunction f = TestFunction::gaussian_packet(
        2, {{Complex{1.0, 0.0}, Vec{0.0, 0.0}, Vec{1.0, 1.0}, Vec{0.0, 0.0}}});
    const Complex v = quantum_ip(f, f, cfg);
    const double rel = std::abs(v - kGoldenStandardPacketNorm) / kGoldenStandardPacketNorm;
    return {rel <= 1e-8, detail_ratio("rel err vs golden", rel, 1e-8)};
}

// 12. EM kernel: brute-force index oracle and the pure-gauge null test.
CriterionResult em_kernel() {
    ShellConfig cfg;
    cfg.mass = 0.0;
    cfg.dimension = 4;
    cfg.quadrature.cutoff = 8.0;
    cfg.quadrature.nodes = 32;

    const Vec a{0.5, 1.0, -0.3, 0.8};
    const Vec bb{1.0, 0.2, 0.5, -0.9};
    auto envelope = [](const WaveVector& kv) {
        return std::exp(-0.05 * dot(kv.coords, kv.coords));
    };
    BivectorSpectrumFn gauge = [&](int mu, int nu, const WaveVector& kv) {
        const Vec klow = eta_apply(kv.coords);
        return Complex{(klow[mu] * a[nu] - klow[nu] * a[mu]) * envelope(kv), 0.0};
    };
    BivectorSpectrumFn control = [&](int mu, int nu, const WaveVector& kv) {
        return Complex{(a[mu] * bb[nu] - a[nu] * bb[mu]) * envelope(kv), 0.0};
    };

    auto eta = [](int i, int j) { return i != j ? 0.0 : (i == 0 ? 1.0 : -1.0); };
    std::mt19937_64 prng(1212);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    double worst_contr = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        Vec k(4);
        k[1] = u(prng);
        k[2] = u(prng);
        k[3] = u(prng);
        k[0] = std::sqrt(k[1] * k[1] + k[2] * k[2] + k[3] * k[3]);
        const WaveVector kv{k};
        Complex oracle{0.0, 0.0};
        for (int mu = 0; mu < 4; ++mu)
            for (int nu = 0; nu < 4; ++nu)
                for (int alpha = 0; alpha < 4; ++alpha)
                    for (int beta = 0; beta < 4; ++beta)
                        oracle += std::conj(control(mu, beta, kv)) * k[mu] * k[nu] *
                                  gauge(nu, alpha, kv) * (-eta(alpha, beta));
        const Complex impl = em_contraction(control, gauge, kv);
        worst_contr =
            std::max(worst_contr, std::abs(impl - oracle) / std::max(1.0, std::abs(oracle)));
    }
    if (worst_contr > 1e-10)
        return {false, detail_ratio("contraction vs oracle", worst_contr, 1e-10)};

    const Complex null_value = em_ip_spectra(gauge, gauge, cfg);
    const Complex control_value = em_ip_spectra(control, control, cfg);
    const double null_ratio = std::abs(null_value) / std::abs(control_value);
    return {null_ratio <= 1e-8, detail_ratio("gauge null/control", null_ratio, 1e-8) + ", " +
                                    detail_ratio("contraction", worst_contr, 1e-10)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<CriterionResult()> run;
        double budget_s;
    };
    const std::vector<Criterion> criteria = {
        {"classical-commutator-identity", classical_commutator_identity, 10.0},
        {"quantum-microcausality", quantum_microcausality, 30.0},
        {"vacuum-moments", vacuum_moments, 5.0},
        {"wick-oracle-equivalence", wick_oracle_equivalence, 10.0},
        {"resonance-probabilities", resonance_probabilities, 5.0},
        {"factor-of-two", factor_of_two, 5.0},
        {"symmetry-suite", symmetry_suite, 20.0},
        {"spacelike-kernel-agreement", spacelike_kernel_agreement, 30.0},
        {"monte-carlo-consistency", monte_carlo_consistency, 60.0},
        {"gram-psd", gram_psd, 30.0},
        {"quadrature-oracle", quadrature_oracle, 5.0},
        {"em-kernel", em_kernel, 10.0},
    };

    int failures = 0;
    int index = 0;
    for (const Criterion& c : criteria) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult result{false, "exception"};
        try {
            result = c.run();
        } catch (const std::exception& ex) {
            result = {false, std::string("exception: ") + ex.what()};
        }
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_budget = dt < c.budget_s;
        const bool pass = result.first && in_budget;
        if (!pass) ++failures;
        std::printf("[%s] criterion-%02d %-30s %s [%.1fs/%.0fs]\n", pass ? "PASS" : "FAIL",
                    index, c.name, result.second.c_str(), dt, c.budget_s);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures;
}
