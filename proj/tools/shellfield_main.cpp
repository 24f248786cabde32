// shellfield: experiment runner over the mass-shell pairing library.
//
//   shellfield <subcommand> --config <path> [--out <path>] [--format csv|json]
//
// Every subcommand reads a JSON experiment config, writes a
// machine-readable result (JSON or CSV) to --out (default: stdout), and
// prints a human-readable summary to stdout when --out is a file.
// Diagnostics go to stderr; results never do. Exit status is 0 iff every
// configured acceptance check passed, 1 on check failure, 2 on
// config/usage/quadrature errors.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "shellfield/fock.hpp"
#include "shellfield/io.hpp"
#include "shellfield/rf.hpp"
#include "shellfield/shell.hpp"

namespace sf = shellfield;
using nlohmann::json;

namespace {

struct OutputOptions {
    std::string config_path;
    std::string out_path = "-";
    std::string format = "json";
};

struct CheckResult {
    std::string name;
    bool pass;
    double value;
    double threshold;
};

struct RunResult {
    json rows = json::array();
    std::vector<CheckResult> checks;
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;

    bool all_pass() const {
        for (const CheckResult& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

struct Experiment {
    int version = 1;
    sf::ShellConfig shell;
    sf::ModeSet modes;
    json experiment;  // subcommand-specific block
    json thresholds;  // overrides
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

Experiment load_experiment(const std::string& path, bool allow_empty_modes = false) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    json j;
    in >> j;
    sf::io::check_keys(j, "experiment config", {"version", "shell", "modes"},
                       {"experiment", "thresholds"});
    Experiment e;
    e.version = j.at("version").get<int>();
    if (e.version != 1) throw std::invalid_argument("experiment config: unsupported version");
    e.shell = sf::io::shell_config_from_json(j.at("shell"));
    for (const json& mj : j.at("modes")) {
        sf::io::check_keys(mj, "mode", {"id"}, {"function", "file"});
        if (mj.contains("function") == mj.contains("file"))
            throw std::invalid_argument("mode: give exactly one of function / file");
        sf::TestFunction fn = [&] {
            if (mj.contains("function")) return sf::io::testfn_from_json(mj.at("function"));
            std::ifstream fin(mj.at("file").get<std::string>());
            if (!fin)
                throw std::invalid_argument("mode: cannot open file '" +
                                            mj.at("file").get<std::string>() + "'");
            json fj;
            fin >> fj;
            return sf::io::testfn_from_json(fj);
        }();
        e.modes.modes.push_back({mj.at("id").get<std::string>(), std::move(fn)});
    }
    if (!allow_empty_modes || !e.modes.modes.empty()) e.modes.validate();
    e.experiment = j.value("experiment", json::object());
    e.thresholds = j.value("thresholds", json::object());
    return e;
}

const sf::TestFunction& mode_by_id(const sf::ModeSet& modes, const std::string& id) {
    for (const auto& m : modes.modes)
        if (m.id == id) return m.fn;
    throw std::invalid_argument("unknown mode id '" + id + "'");
}

double threshold(const Experiment& e, const std::string& name, double fallback) {
    return e.thresholds.value(name, fallback);
}

void check_thresholds(const Experiment& e, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : e.thresholds.items()) {
        bool known = false;
        for (const char* k : allowed) known = known || key == k;
        if (!known) throw std::invalid_argument("thresholds: unknown key '" + key + "'");
    }
}

std::vector<std::pair<std::string, std::string>> pair_list(const Experiment& e,
                                                           bool include_diagonal) {
    std::vector<std::pair<std::string, std::string>> pairs;
    if (e.experiment.contains("pairs")) {
        for (const json& p : e.experiment.at("pairs")) {
            if (!p.is_array() || p.size() != 2)
                throw std::invalid_argument("experiment.pairs: expected [f_id, g_id] entries");
            pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
        }
        return pairs;
    }
    const auto& m = e.modes.modes;
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = i + (include_diagonal ? 0 : 1); j < m.size(); ++j)
            pairs.emplace_back(m[i].id, m[j].id);
    return pairs;
}

// ---------------------------------------------------------------- ip ----

RunResult run_ip(const Experiment& e) {
    RunResult r;
    check_thresholds(e, {"diag_imag"});
    r.csv_header = {"kernel", "f_id", "g_id", "value_re", "value_im", "est_error"};
    sf::io::check_keys(e.experiment, "ip experiment", {},
                       {"pairs", "estimate_error", "bivectors"});
    if (e.modes.modes.empty() && !e.experiment.contains("bivectors"))
        throw std::invalid_argument("ip: empty mode list");
    const bool est = e.experiment.value("estimate_error", true);
    double max_diag_imag = 0.0;
    auto row = [&](sf::KernelKind kind, const std::string& fid, const std::string& gid,
                   sf::Complex value, double err) {
        if (fid == gid)
            max_diag_imag = std::max(max_diag_imag,
                                     std::abs(value.imag()) / std::max(1e-300, std::abs(value)));
        r.rows.push_back({{"kernel", sf::to_string(kind)},
                          {"f_id", fid},
                          {"g_id", gid},
                          {"value_re", value.real()},
                          {"value_im", value.imag()},
                          {"est_error", err}});
        r.csv_rows.push_back(
            {sf::to_string(kind), fid, gid, fmt(value.real()), fmt(value.imag()), fmt(err)});
    };
    if (!e.modes.modes.empty()) {
        for (const auto& [fid, gid] : pair_list(e, true)) {
            const sf::TestFunction& f = mode_by_id(e.modes, fid);
            const sf::TestFunction& g = mode_by_id(e.modes, gid);
            for (sf::KernelKind kind : {sf::KernelKind::Quantum, sf::KernelKind::Classical}) {
                sf::PairingResult pr =
                    est ? sf::pairing_with_error(f, g, kind, e.shell)
                        : sf::PairingResult{sf::pairing(f, g, kind, e.shell), 0.0};
                row(kind, fid, gid, pr.value, pr.est_error);
            }
        }
    }
    if (e.experiment.contains("bivectors")) {
        std::vector<std::pair<std::string, sf::BivectorTestFunction>> bivs;
        for (const json& bj : e.experiment.at("bivectors")) {
            sf::io::check_keys(bj, "bivector mode", {"id", "components"}, {});
            sf::BivectorTestFunction b(4);
            for (const json& cj : bj.at("components")) {
                sf::io::check_keys(cj, "bivector component", {"mu", "nu", "function"}, {});
                b.set_component(cj.at("mu").get<int>(), cj.at("nu").get<int>(),
                                sf::io::testfn_from_json(cj.at("function")));
            }
            bivs.emplace_back(bj.at("id").get<std::string>(), std::move(b));
        }
        for (size_t i = 0; i < bivs.size(); ++i)
            for (size_t j = i; j < bivs.size(); ++j)
                row(sf::KernelKind::EMQuantum, bivs[i].first, bivs[j].first,
                    sf::em_ip(bivs[i].second, bivs[j].second, e.shell), 0.0);
    }
    const double thr = threshold(e, "diag_imag", 1e-12);
    r.checks.push_back({"diagonal-imaginary-part", max_diag_imag <= thr, max_diag_imag, thr});
    return r;
}

// --------------------------------------------------- commutator-scan ----

struct SupportInfo {
    bool ellipsoid;
    sf::Vec center, radius;  // ellipsoid
    sf::Vec lo, hi;          // box fallback
};

SupportInfo support_of(const sf::TestFunction& f) {
    const auto& g = std::get<sf::detail::GridData>(f.payload().data);
    SupportInfo s;
    s.ellipsoid = g.has_ellipsoid;
    if (g.has_ellipsoid) {
        s.center = g.ell_center;
        s.radius = g.ell_radius;
    }
    s.lo = g.lo;
    s.hi = g.hi;
    return s;
}

// Causal separation of two supports. For ellipsoids the worst-case pair
// margin in the (t, offset-direction) plane is
//   |dX| - |dT| - sum_i sqrt(rt_i^2 + rd_i^2)
// with rd the radius along the spatial offset direction; boxes use
// corner extremes.
std::string classify_separation(const SupportInfo& a, const SupportInfo& b) {
    const int d = a.lo.dim();
    if (a.ellipsoid && b.ellipsoid) {
        const sf::Vec delta = b.center - a.center;
        double dt = std::fabs(delta[0]);
        double dx2 = 0.0;
        for (int i = 1; i < d; ++i) dx2 += delta[i] * delta[i];
        const double dx = std::sqrt(dx2);
        auto reach = [&](const SupportInfo& s) {
            double rd = 0.0;
            if (dx > 0.0) {
                for (int i = 1; i < d; ++i) {
                    const double u = delta[i] / dx;
                    rd += s.radius[i] * u * s.radius[i] * u;
                }
                rd = std::sqrt(rd);
            } else {
                for (int i = 1; i < d; ++i) rd = std::max(rd, s.radius[i]);
            }
            return std::sqrt(s.radius[0] * s.radius[0] + rd * rd);
        };
        const double margin_space = dx - dt - reach(a) - reach(b);
        const double margin_time = dt - dx - reach(a) - reach(b);
        if (margin_space > 1e-9) return "spacelike";
        if (margin_time > 1e-9) return "timelike";
        return "mixed";
    }
    // Box supports: interval extremes per axis.
    auto axis_gap = [](double alo, double ahi, double blo, double bhi) {
        return std::max({0.0, blo - ahi, alo - bhi});
    };
    auto axis_reach = [](double alo, double ahi, double blo, double bhi) {
        return std::max(std::fabs(bhi - alo), std::fabs(ahi - blo));
    };
    const double max_dt = axis_reach(a.lo[0], a.hi[0], b.lo[0], b.hi[0]);
    const double min_dt = axis_gap(a.lo[0], a.hi[0], b.lo[0], b.hi[0]);
    double min_dx2 = 0.0, max_dx2 = 0.0;
    for (int i = 1; i < d; ++i) {
        const double gap = axis_gap(a.lo[i], a.hi[i], b.lo[i], b.hi[i]);
        const double reach = axis_reach(a.lo[i], a.hi[i], b.lo[i], b.hi[i]);
        min_dx2 += gap * gap;
        max_dx2 += reach * reach;
    }
    if (std::sqrt(min_dx2) > max_dt + 1e-9) return "spacelike";
    if (min_dt > std::sqrt(max_dx2) + 1e-9) return "timelike";
    return "mixed";
}

RunResult run_commutator_scan(const Experiment& e) {
    RunResult r;
    check_thresholds(e, {"classical_zero", "microcausality_ratio"});
    r.csv_header = {"offset", "separation", "kernel", "abs_value", "value_re", "value_im"};
    sf::io::check_keys(e.experiment, "commutator-scan experiment", {"mode_f", "mode_g", "offsets"},
                       {});
    const sf::TestFunction& f = mode_by_id(e.modes, e.experiment.at("mode_f"));
    const sf::TestFunction& g0 = mode_by_id(e.modes, e.experiment.at("mode_g"));
    if (!f.compact_support() || !g0.compact_support())
        throw std::invalid_argument(
            "commutator-scan: modes must be compactly supported grid bumps");

    const sf::Complex nf = sf::quantum_ip(f, f, e.shell);
    const sf::Complex ng = sf::quantum_ip(g0, g0, e.shell);
    const double scale = std::max(std::abs(nf), std::abs(ng));

    double classical_max = 0.0, spacelike_max = 0.0, timelike_max = 0.0;
    bool have_spacelike = false, have_timelike = false;
    for (const json& oj : e.experiment.at("offsets")) {
        sf::Vec off(static_cast<int>(oj.size()));
        for (int i = 0; i < off.dim(); ++i) off[i] = oj[static_cast<size_t>(i)].get<double>();
        const sf::TestFunction g = sf::translate(g0, sf::SpacetimePoint{off});
        const std::string sep = classify_separation(support_of(f), support_of(g));
        std::string offs = "(";
        for (int i = 0; i < off.dim(); ++i) offs += (i ? ";" : "") + fmt(off[i]);
        offs += ")";
        for (sf::KernelKind kind : {sf::KernelKind::Quantum, sf::KernelKind::Classical}) {
            const sf::Complex c = sf::commutator_kernel(f, g, kind, e.shell);
            const double mag = std::abs(c);
            if (kind == sf::KernelKind::Classical) classical_max = std::max(classical_max, mag);
            if (kind == sf::KernelKind::Quantum && sep == "spacelike") {
                spacelike_max = std::max(spacelike_max, mag);
                have_spacelike = true;
            }
            if (kind == sf::KernelKind::Quantum && sep == "timelike") {
                timelike_max = std::max(timelike_max, mag);
                have_timelike = true;
            }
            r.rows.push_back({{"offset", oj},
                              {"separation", sep},
                              {"kernel", sf::to_string(kind)},
                              {"abs_value", mag},
                              {"value_re", c.real()},
                              {"value_im", c.imag()}});
            r.csv_rows.push_back(
                {offs, sep, sf::to_string(kind), fmt(mag), fmt(c.real()), fmt(c.imag())});
        }
    }
    const double thr_cl = threshold(e, "classical_zero", 1e-12);
    r.checks.push_back({"classical-commutator-zero", classical_max <= thr_cl * scale,
                        classical_max / std::max(scale, 1e-300), thr_cl});
    if (have_spacelike && have_timelike) {
        const double thr_mc = threshold(e, "microcausality_ratio", 1e-6);
        const double ratio = spacelike_max / std::max(timelike_max, 1e-300);
        r.checks.push_back({"microcausality-spacelike-ratio", ratio <= thr_mc, ratio, thr_mc});
    }
    return r;
}

// --------------------------------------------------------- symmetry ----

RunResult run_symmetry(const Experiment& e) {
    RunResult r;
    check_thresholds(e, {"poincare", "time_reversal_classical", "two_shell", "witness_min_change"});
    r.csv_header = {"transform", "kernel",  "f_id", "g_id",
                    "base_re",   "base_im", "rel_change"};
    sf::io::check_keys(e.experiment, "symmetry experiment", {},
                       {"pairs", "translation", "boost_rapidity", "boost_axis", "witness"});
    sf::Vec trans(e.shell.dimension, 0.0);
    trans[0] = 0.8;
    trans[e.shell.dimension - 1] = -0.5;
    if (e.experiment.contains("translation")) {
        const json& tj = e.experiment.at("translation");
        for (int i = 0; i < trans.dim(); ++i) trans[i] = tj[static_cast<size_t>(i)].get<double>();
    }
    const double eta = e.experiment.value("boost_rapidity", 0.5);
    const int axis = e.experiment.value("boost_axis", 1);

    for (const auto& m : e.modes.modes)
        if (m.fn.is_grid())
            throw std::invalid_argument(
                "symmetry: packet modes required (grid boosts are resample-approximate)");

    double worst_poincare = 0.0, worst_classical_t = 0.0, worst_two_shell = 0.0;
    for (const auto& [fid, gid] : pair_list(e, true)) {
        const sf::TestFunction& f = mode_by_id(e.modes, fid);
        const sf::TestFunction& g = mode_by_id(e.modes, gid);
        struct Xform {
            std::string name;
            sf::TestFunction tf, tg;
        };
        const std::vector<Xform> xforms = {
            {"translate", sf::translate(f, sf::SpacetimePoint{trans}),
             sf::translate(g, sf::SpacetimePoint{trans})},
            {"boost", sf::boost(f, eta, axis), sf::boost(g, eta, axis)},
            {"parity", sf::parity_reverse(f), sf::parity_reverse(g)},
            {"time-reverse", sf::time_reverse(f), sf::time_reverse(g)},
        };
        for (sf::KernelKind kind : {sf::KernelKind::Quantum, sf::KernelKind::Classical}) {
            const sf::Complex base = sf::pairing(f, g, kind, e.shell);
            for (const Xform& x : xforms) {
                const sf::Complex moved = sf::pairing(x.tf, x.tg, kind, e.shell);
                const double rel = std::abs(moved - base) / std::max(std::abs(base), 1e-300);
                if (x.name != "time-reverse")
                    worst_poincare = std::max(worst_poincare, rel);
                else if (kind == sf::KernelKind::Classical)
                    worst_classical_t = std::max(worst_classical_t, rel);
                r.rows.push_back({{"transform", x.name},
                                  {"kernel", sf::to_string(kind)},
                                  {"f_id", fid},
                                  {"g_id", gid},
                                  {"base_re", base.real()},
                                  {"base_im", base.imag()},
                                  {"rel_change", rel}});
                r.csv_rows.push_back({x.name, sf::to_string(kind), fid, gid, fmt(base.real()),
                                      fmt(base.imag()), fmt(rel)});
            }
        }
        // Two-shell identity: q(Tf,Tg) + q(f,g) = 2 c(f,g).
        const sf::Complex q = sf::quantum_ip(f, g, e.shell);
        const sf::Complex qt =
            sf::quantum_ip(sf::time_reverse(f), sf::time_reverse(g), e.shell);
        const sf::Complex c = sf::classical_ip(f, g, e.shell);
        const double resid = std::abs(qt + q - 2.0 * c) / std::max(std::abs(c), 1e-300);
        worst_two_shell = std::max(worst_two_shell, resid);
        r.rows.push_back({{"transform", "two-shell-identity"},
                          {"kernel", "both"},
                          {"f_id", fid},
                          {"g_id", gid},
                          {"base_re", c.real()},
                          {"base_im", c.imag()},
                          {"rel_change", resid}});
        r.csv_rows.push_back({"two-shell-identity", "both", fid, gid, fmt(c.real()),
                              fmt(c.imag()), fmt(resid)});
    }

    const double thr_p = threshold(e, "poincare", 1e-8);
    const double thr_ct = threshold(e, "time_reversal_classical", 1e-10);
    const double thr_ts = threshold(e, "two_shell", 1e-9);
    r.checks.push_back({"poincare-invariance", worst_poincare <= thr_p, worst_poincare, thr_p});
    r.checks.push_back({"time-reversal-classical-invariance", worst_classical_t <= thr_ct,
                        worst_classical_t, thr_ct});
    r.checks.push_back({"two-shell-identity", worst_two_shell <= thr_ts, worst_two_shell, thr_ts});

    if (e.experiment.contains("witness")) {
        const sf::TestFunction& w = mode_by_id(e.modes, e.experiment.at("witness"));
        const sf::Complex qw = sf::quantum_ip(w, w, e.shell);
        const sf::Complex qtw =
            sf::quantum_ip(sf::time_reverse(w), sf::time_reverse(w), e.shell);
        const double change = std::abs(qtw - qw) / std::max(std::abs(qw), 1e-300);
        const double thr_w = threshold(e, "witness_min_change", 0.5);
        r.checks.push_back({"time-reversal-quantum-witness", change >= thr_w, change, thr_w});
        r.rows.push_back({{"transform", "time-reverse-witness"},
                          {"kernel", "quantum"},
                          {"f_id", e.experiment.at("witness")},
                          {"g_id", e.experiment.at("witness")},
                          {"base_re", qw.real()},
                          {"base_im", qw.imag()},
                          {"rel_change", change}});
        r.csv_rows.push_back({"time-reverse-witness", "quantum", e.experiment.at("witness"),
                              e.experiment.at("witness"), fmt(qw.real()), fmt(qw.imag()),
                              fmt(change)});
    }
    return r;
}

// ---------------------------------------------------------- moments ----

double double_factorial_pairings(int k) {
    // (2k)! / (2^k k!) = (2k-1)!!
    double v = 1.0;
    for (int i = 2 * k - 1; i > 1; i -= 2) v *= static_cast<double>(i);
    return v;
}

RunResult run_moments(const Experiment& e) {
    RunResult r;
    check_thresholds(e, {"closed_form_rel", "odd_moment_abs", "max_z"});
    r.csv_header = {"mode_id", "kernel",       "order", "engine_re", "engine_im",
                    "closed",  "mc_empirical", "mc_z"};
    sf::io::check_keys(e.experiment, "moments experiment", {}, {"max_k", "monte_carlo", "modes"});
    const int max_k = e.experiment.value("max_k", 5);
    if (max_k < 1 || max_k > sf::kMaxMomentPower / 2)
        throw std::invalid_argument("moments: max_k must lie in [1, 6]");
    std::optional<std::pair<std::int64_t, std::uint64_t>> mc;
    if (e.experiment.contains("monte_carlo")) {
        const json& m = e.experiment.at("monte_carlo");
        sf::io::check_keys(m, "monte_carlo", {"n", "seed"}, {});
        mc = {m.at("n").get<std::int64_t>(), m.at("seed").get<std::uint64_t>()};
    }

    double worst_even = 0.0, worst_odd = 0.0, worst_z = 0.0;
    for (const auto& entry : e.modes.modes) {
        const sf::TestFunction& f = entry.fn;
        if (!f.is_real())
            throw std::invalid_argument("moments: mode '" + entry.id + "' must be real");

        // One reseeded retry on |z| > 3, per the statistical test policy.
        std::vector<sf::MomentEstimate> emp;
        if (mc) {
            sf::ModeSet one;
            one.modes.push_back(entry);
            std::vector<int> orders;
            for (int n = 1; n <= 2 * max_k; ++n) orders.push_back(std::min(n, 8));
            orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
            for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
                const sf::GramMatrix gm = sf::gram(one, sf::KernelKind::Classical, e.shell);
                const sf::SampleBatch batch = sf::sample(gm, mc->first, mc->second + attempt);
                emp = sf::empirical_moments(batch, 0, orders);
                bool ok = true;
                for (const sf::MomentEstimate& m : emp) {
                    const double pred =
                        sf::field_moment(f, m.order, sf::KernelKind::Classical, e.shell).real();
                    if (m.stderr_jackknife > 0.0 &&
                        std::fabs(m.value - pred) / m.stderr_jackknife > 3.0)
                        ok = false;
                }
                if (ok) break;
            }
        }

        for (sf::KernelKind kind : {sf::KernelKind::Quantum, sf::KernelKind::Classical}) {
            const double var =
                sf::field_moment(f, 2, kind, e.shell).real();
            for (int n = 1; n <= 2 * max_k; ++n) {
                const sf::Complex engine = sf::field_moment(f, n, kind, e.shell);
                double closed = 0.0;
                if (n % 2 == 0) closed = double_factorial_pairings(n / 2) * std::pow(var, n / 2);
                if (n % 2 == 0) {
                    const double rel = std::abs(engine - closed) / std::max(closed, 1e-300);
                    worst_even = std::max(worst_even, rel);
                } else {
                    const double scale = std::pow(std::max(var, 1.0), 0.5 * n);
                    worst_odd = std::max(worst_odd, std::abs(engine) / scale);
                }
                double mc_emp = 0.0, mc_z = 0.0;
                bool have_mc = false;
                if (mc && kind == sf::KernelKind::Classical && n <= 8) {
                    for (const sf::MomentEstimate& m : emp)
                        if (m.order == n) {
                            mc_emp = m.value;
                            mc_z = m.stderr_jackknife > 0.0
                                       ? (m.value - engine.real()) / m.stderr_jackknife
                                       : 0.0;
                            worst_z = std::max(worst_z, std::fabs(mc_z));
                            have_mc = true;
                        }
                }
                json row = {{"mode_id", entry.id},       {"kernel", sf::to_string(kind)},
                            {"order", n},                {"engine_re", engine.real()},
                            {"engine_im", engine.imag()}, {"closed", closed}};
                if (have_mc) {
                    row["mc_empirical"] = mc_emp;
                    row["mc_z"] = mc_z;
                }
                r.rows.push_back(std::move(row));
                r.csv_rows.push_back({entry.id, sf::to_string(kind), fmt(n), fmt(engine.real()),
                                      fmt(engine.imag()), fmt(closed),
                                      have_mc ? fmt(mc_emp) : "", have_mc ? fmt(mc_z) : ""});
            }
        }
    }
    const double thr_even = threshold(e, "closed_form_rel", 1e-10);
    const double thr_odd = threshold(e, "odd_moment_abs", 1e-12);
    r.checks.push_back({"even-moment-closed-form", worst_even <= thr_even, worst_even, thr_even});
    r.checks.push_back({"odd-moment-zero", worst_odd <= thr_odd, worst_odd, thr_odd});
    if (mc) {
        const double thr_z = threshold(e, "max_z", 3.0);
        r.checks.push_back({"monte-carlo-z", worst_z <= thr_z, worst_z, thr_z});
    }
    return r;
}

// -------------------------------------------------------- resonance ----

RunResult run_resonance(const Experiment& e) {
    RunResult r;
    check_thresholds(e, {"probability_eps"});
    r.csv_header = {"row", "f_id", "g_id", "kernel", "value", "error"};
    sf::io::check_keys(e.experiment, "resonance experiment", {}, {"pairs", "witness_pairs"});
    double p_min = 0.0, p_max = 0.0;
    int rows_total = 0, rows_failed = 0;
    for (const auto& [fid, gid] : pair_list(e, true)) {
        const sf::TestFunction& f = mode_by_id(e.modes, fid);
        const sf::TestFunction& g = mode_by_id(e.modes, gid);
        for (sf::KernelKind kind : {sf::KernelKind::Quantum, sf::KernelKind::Classical}) {
            ++rows_total;
            std::string err;
            double p = 0.0;
            try {
                p = sf::resonance_probability(f, sf::FockState::one_particle(g), kind, e.shell);
                p_min = std::min(p_min, p);
                p_max = std::max(p_max, p);
            } catch (const sf::ZeroNormError& ex) {
                err = ex.what();
                ++rows_failed;
            }
            r.rows.push_back({{"row", "probability"},
                              {"f_id", fid},
                              {"g_id", gid},
                              {"kernel", sf::to_string(kind)},
                              {"value", p},
                              {"error", err}});
            r.csv_rows.push_back(
                {"probability", fid, gid, sf::to_string(kind), fmt(p), err});
        }
    }
    if (e.experiment.contains("witness_pairs")) {
        for (const json& p : e.experiment.at("witness_pairs")) {
            const std::string fid = p[0].get<std::string>(), gid = p[1].get<std::string>();
            ++rows_total;
            std::string err;
            double w = 0.0;
            try {
                w = sf::resonance_nonlocality_witness(mode_by_id(e.modes, fid),
                                                      mode_by_id(e.modes, gid), e.shell);
            } catch (const sf::ZeroNormError& ex) {
                err = ex.what();
                ++rows_failed;
            }
            r.rows.push_back({{"row", "nonlocality-witness"},
                              {"f_id", fid},
                              {"g_id", gid},
                              {"kernel", "quantum"},
                              {"value", w},
                              {"error", err}});
            r.csv_rows.push_back({"nonlocality-witness", fid, gid, "quantum", fmt(w), err});
        }
    }
    const double eps = threshold(e, "probability_eps", 1e-12);
    r.checks.push_back({"probability-range-lower", p_min >= -eps, p_min, -eps});
    r.checks.push_back({"probability-range-upper", p_max <= 1.0 + eps, p_max, 1.0 + eps});
    r.checks.push_back({"rows-not-all-failed", rows_failed < rows_total,
                        static_cast<double>(rows_failed), static_cast<double>(rows_total)});
    return r;
}

// ---------------------------------------------------------- factor2 ----

RunResult run_factor2(const Experiment& e) {
    RunResult r;
    check_thresholds(e, {"factor2_rel"});
    r.csv_header = {"f_id",         "g_id",      "projected", "quantum_re", "quantum_im",
                    "classical_re", "classical_im", "residual"};
    sf::io::check_keys(e.experiment, "factor2 experiment", {}, {"pairs", "control_pairs"});
    double worst = 0.0;
    auto emit = [&](const std::string& fid, const std::string& gid, bool projected) {
        sf::TestFunction f = mode_by_id(e.modes, fid);
        sf::TestFunction g = mode_by_id(e.modes, gid);
        if (projected) {
            f = sf::positive_frequency_projection(f);
            g = sf::positive_frequency_projection(g);
        }
        const sf::Complex q = sf::quantum_ip(f, g, e.shell);
        const sf::Complex c = sf::classical_ip(f, g, e.shell);
        const double resid = std::abs(q - 2.0 * c) / std::max(std::abs(q), 1e-300);
        if (projected) worst = std::max(worst, resid);
        r.rows.push_back({{"f_id", fid},
                          {"g_id", gid},
                          {"projected", projected},
                          {"quantum_re", q.real()},
                          {"quantum_im", q.imag()},
                          {"classical_re", c.real()},
                          {"classical_im", c.imag()},
                          {"residual", resid}});
        r.csv_rows.push_back({fid, gid, projected ? "true" : "false", fmt(q.real()),
                              fmt(q.imag()), fmt(c.real()), fmt(c.imag()), fmt(resid)});
    };
    for (const auto& [fid, gid] : pair_list(e, true)) emit(fid, gid, true);
    if (e.experiment.contains("control_pairs"))
        for (const json& p : e.experiment.at("control_pairs"))
            emit(p[0].get<std::string>(), p[1].get<std::string>(), false);
    const double thr = threshold(e, "factor2_rel", 1e-6);
    r.checks.push_back({"factor-two-residual", worst <= thr, worst, thr});
    return r;
}

// ----------------------------------------------------------- output ----

int emit(const std::string& command, const OutputOptions& opt, const RunResult& r) {
    json out;
    out["command"] = command;
    out["config"] = opt.config_path;
    out["rows"] = r.rows;
    json checks = json::array();
    for (const CheckResult& c : r.checks)
        checks.push_back(
            {{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"threshold", c.threshold}});
    out["checks"] = std::move(checks);
    out["pass"] = r.all_pass();

    std::string text;
    if (opt.format == "json") {
        text = out.dump(2) + "\n";
    } else {
        std::ostringstream os;
        for (size_t i = 0; i < r.csv_header.size(); ++i)
            os << (i ? "," : "") << r.csv_header[i];
        os << "\n";
        for (const auto& row : r.csv_rows) {
            for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
            os << "\n";
        }
        text = os.str();
    }

    if (opt.out_path == "-") {
        std::cout << text;
    } else {
        std::ofstream f(opt.out_path);
        if (!f) {
            std::cerr << "error: cannot write '" << opt.out_path << "'\n";
            return 2;
        }
        f << text;
        std::cout << command << ": " << r.rows.size() << " rows -> " << opt.out_path << "\n";
        for (const CheckResult& c : r.checks)
            std::cout << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name
                      << " (value " << c.value << ", threshold " << c.threshold << ")\n";
    }
    return r.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mass-shell pairing experiments"};
    app.require_subcommand(1);

    std::map<std::string, OutputOptions> opts;
    std::map<std::string, CLI::App*> subs;
    for (const char* name :
         {"ip", "commutator-scan", "symmetry", "moments", "resonance", "factor2"}) {
        CLI::App* sub = app.add_subcommand(name);
        OutputOptions& o = opts[name];
        sub->add_option("--config", o.config_path, "experiment config (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", o.out_path, "result path ('-' = stdout)");
        sub->add_option("--format", o.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        subs[name] = sub;
    }

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    const OutputOptions& o = opts[command];
    try {
        // ip may run on bivector modes alone; everywhere else an empty
        // mode list is a usage error.
        const Experiment e = load_experiment(o.config_path, command == "ip");
        RunResult r;
        if (command == "ip") r = run_ip(e);
        else if (command == "commutator-scan") r = run_commutator_scan(e);
        else if (command == "symmetry") r = run_symmetry(e);
        else if (command == "moments") r = run_moments(e);
        else if (command == "resonance") r = run_resonance(e);
        else r = run_factor2(e);
        return emit(command, o, r);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}
