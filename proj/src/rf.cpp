#include "shellfield/rf.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include "shellfield/linalg.hpp"
#include "shellfield/rng.hpp"

namespace shellfield {

void ModeSet::validate() const {
    if (modes.empty()) throw std::invalid_argument("ModeSet: empty mode list");
    std::set<std::string> seen;
    for (const Entry& e : modes) {
        if (e.id.empty()) throw std::invalid_argument("ModeSet: empty mode id");
        if (!seen.insert(e.id).second)
            throw std::invalid_argument("ModeSet: duplicate mode id '" + e.id + "'");
    }
}

Real GramMatrix::trace() const {
    Real t = 0.0;
    for (int i = 0; i < size(); ++i) t += at(i, i).real();
    return t;
}

Real GramMatrix::min_eigenvalue() const {
    const SymEigen eig = jacobi_eigen(hermitian_embedding(c_, size()), 2 * size());
    return eig.values.front();
}

GramMatrix gram(const ModeSet& modes, KernelKind kind, const ShellConfig& cfg) {
    modes.validate();
    cfg.validate();
    const int m = modes.size();
    GramMatrix gm;
    gm.kernel_ = kind;
    gm.cfg_ = cfg;
    for (const ModeSet::Entry& e : modes.modes) {
        if (e.fn.spectrum_scale() <= 0.0)
            throw std::invalid_argument("gram: mode '" + e.id + "' is the zero function");
        gm.ids_.push_back(e.id);
    }

    // C_ij = (f_i, f_j): the pairing conjugates its first slot, so this is
    // the Hermitian mode Gram; conjugate-symmetrized to remove quadrature
    // rounding asymmetry.
    std::vector<Complex> raw(static_cast<size_t>(m) * static_cast<size_t>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            raw[static_cast<size_t>(i) * static_cast<size_t>(m) + static_cast<size_t>(j)] =
                pairing(modes.modes[static_cast<size_t>(i)].fn,
                        modes.modes[static_cast<size_t>(j)].fn, kind, cfg);
    gm.c_.resize(raw.size());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const size_t ij = static_cast<size_t>(i) * static_cast<size_t>(m) + static_cast<size_t>(j);
            const size_t ji = static_cast<size_t>(j) * static_cast<size_t>(m) + static_cast<size_t>(i);
            gm.c_[ij] = 0.5 * (raw[ij] + std::conj(raw[ji]));
        }

    // Doubled real system: real/imaginary parts as real modes.
    GramMatrix::RealSystem rs;
    std::vector<TestFunction> comps;
    for (const ModeSet::Entry& e : modes.modes) {
        if (e.fn.is_real()) {
            rs.re_index.push_back(static_cast<int>(comps.size()));
            rs.im_index.push_back(-1);
            comps.push_back(e.fn);
        } else {
            rs.re_index.push_back(static_cast<int>(comps.size()));
            comps.push_back(real_part(e.fn));
            rs.im_index.push_back(static_cast<int>(comps.size()));
            comps.push_back(imag_part(e.fn));
        }
    }
    rs.size = static_cast<int>(comps.size());
    rs.covariance.assign(static_cast<size_t>(rs.size) * static_cast<size_t>(rs.size), 0.0);
    for (int a = 0; a < rs.size; ++a)
        for (int b = a; b < rs.size; ++b) {
            const Real v = pairing(comps[static_cast<size_t>(a)], comps[static_cast<size_t>(b)],
                                   kind, cfg)
                               .real();
            rs.covariance[static_cast<size_t>(a) * static_cast<size_t>(rs.size) +
                          static_cast<size_t>(b)] = v;
            rs.covariance[static_cast<size_t>(b) * static_cast<size_t>(rs.size) +
                          static_cast<size_t>(a)] = v;
        }
    gm.rs_ = std::move(rs);

    const Real tr = gm.trace();
    if (gm.min_eigenvalue() < -kPsdTolerance * std::max(tr, 0.0))
        throw QuadratureError("gram: pairing matrix violates the PSD tolerance");
    return gm;
}

SampleBatch sample(const GramMatrix& gm, std::int64_t n, std::uint64_t seed, int threads) {
    if (n < 0) throw std::invalid_argument("sample: negative sample count");
    if (threads < 1) throw std::invalid_argument("sample: thread count must be >= 1");
    const GramMatrix::RealSystem& rs = gm.real_system();
    const int s = rs.size;
    const int m = gm.size();

    // Spectral factor with negative-eigenvalue clipping.
    const SymEigen eig = jacobi_eigen(rs.covariance, s);
    Real tr = 0.0;
    for (int i = 0; i < s; ++i)
        tr += rs.covariance[static_cast<size_t>(i) * static_cast<size_t>(s) + static_cast<size_t>(i)];
    std::vector<Real> factor(static_cast<size_t>(s) * static_cast<size_t>(s), 0.0);
    for (int j = 0; j < s; ++j) {
        Real lam = eig.values[static_cast<size_t>(j)];
        if (lam < -kPsdTolerance * std::max(tr, 0.0))
            throw QuadratureError("sample: covariance violates the PSD tolerance");
        lam = std::max(lam, 0.0);
        const Real root = std::sqrt(lam);
        for (int i = 0; i < s; ++i)
            factor[static_cast<size_t>(i) * static_cast<size_t>(s) + static_cast<size_t>(j)] =
                eig.vectors[static_cast<size_t>(i) * static_cast<size_t>(s) + static_cast<size_t>(j)] *
                root;
    }

    SampleBatch batch;
    batch.n = n;
    batch.seed = seed;
    batch.mode_ids = gm.ids();
    batch.kernel = gm.kernel();
    batch.rng = kRngAlgorithm;
    batch.draws.assign(static_cast<size_t>(n) * static_cast<size_t>(m), Complex{0.0, 0.0});

    auto worker = [&](std::int64_t lo, std::int64_t hi) {
        std::vector<Real> z(static_cast<size_t>(s));
        std::vector<Real> x(static_cast<size_t>(s));
        for (std::int64_t i = lo; i < hi; ++i) {
            for (int j = 0; j < s; ++j)
                z[static_cast<size_t>(j)] =
                    counter_normal(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
            for (int r = 0; r < s; ++r) {
                Real acc = 0.0;
                const Real* row = factor.data() + static_cast<size_t>(r) * static_cast<size_t>(s);
                for (int j = 0; j < s; ++j) acc += row[j] * z[static_cast<size_t>(j)];
                x[static_cast<size_t>(r)] = acc;
            }
            for (int mode = 0; mode < m; ++mode) {
                const Real re = x[static_cast<size_t>(rs.re_index[static_cast<size_t>(mode)])];
                const int im_ix = rs.im_index[static_cast<size_t>(mode)];
                const Real im = im_ix >= 0 ? x[static_cast<size_t>(im_ix)] : 0.0;
                batch.draws[static_cast<size_t>(i) * static_cast<size_t>(m) +
                            static_cast<size_t>(mode)] = Complex{re, im};
            }
        }
    };

    if (threads == 1 || n < 2 * threads) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::int64_t chunk = (n + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const std::int64_t lo = static_cast<std::int64_t>(t) * chunk;
            const std::int64_t hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (std::thread& t : pool) t.join();
    }
    return batch;
}

std::vector<MomentEstimate> empirical_moments(const SampleBatch& batch, int mode_index,
                                              const std::vector<int>& orders) {
    const int m = static_cast<int>(batch.mode_ids.size());
    if (mode_index < 0 || mode_index >= m)
        throw std::invalid_argument("empirical_moments: mode index out of range");
    if (batch.n < 2) throw std::invalid_argument("empirical_moments: need at least 2 samples");
    for (int p : orders)
        if (p < 1 || p > kMaxEmpiricalOrder)
            throw std::invalid_argument("empirical_moments: orders must lie in [1, 8]");
    for (std::int64_t i = 0; i < batch.n; ++i)
        if (batch.at(i, mode_index).imag() != 0.0)
            throw std::invalid_argument("empirical_moments: mode has complex draws; moments are "
                                        "defined for real modes");

    std::vector<MomentEstimate> out;
    out.reserve(orders.size());
    const Real nn = static_cast<Real>(batch.n);
    for (int p : orders) {
        Real sum = 0.0;
        for (std::int64_t i = 0; i < batch.n; ++i)
            sum += std::pow(batch.at(i, mode_index).real(), p);
        const Real mean = sum / nn;
        Real var = 0.0;
        for (std::int64_t i = 0; i < batch.n; ++i) {
            const Real d = std::pow(batch.at(i, mode_index).real(), p) - mean;
            var += d * d;
        }
        // Delete-one jackknife of a sample mean: SE^2 = sum (v-m)^2 / (n(n-1)).
        const Real se = std::sqrt(var / (nn * (nn - 1.0)));
        MomentEstimate e;
        e.order = p;
        e.value = mean;
        e.stderr_jackknife = se;
        e.large_error_warning = se > 0.5 * std::fabs(mean);
        out.push_back(e);
    }
    return out;
}

CompareReport compare_to_fock(const ModeSet& modes, const std::vector<int>& orders,
                              std::int64_t n, std::uint64_t seed, const ShellConfig& cfg) {
    modes.validate();
    CompareReport report;
    report.n = n;
    report.seed = seed;
    report.rng = kRngAlgorithm;

    if (!orders.empty()) {
        const GramMatrix gm = gram(modes, KernelKind::Classical, cfg);
        const SampleBatch batch = sample(gm, n, seed);
        for (int mi = 0; mi < modes.size(); ++mi) {
            const ModeSet::Entry& e = modes.modes[static_cast<size_t>(mi)];
            if (!e.fn.is_real()) {
                report.skipped_modes.push_back(e.id);
                continue;
            }
            const std::vector<MomentEstimate> emp = empirical_moments(batch, mi, orders);
            for (size_t oi = 0; oi < orders.size(); ++oi) {
                CompareMomentRow row;
                row.mode_id = e.id;
                row.order = orders[oi];
                row.predicted =
                    field_moment(e.fn, orders[oi], KernelKind::Classical, cfg).real();
                row.empirical = emp[oi].value;
                row.stderr_ = emp[oi].stderr_jackknife;
                row.z = row.stderr_ > 0.0 ? (row.empirical - row.predicted) / row.stderr_
                                          : (row.empirical == row.predicted ? 0.0 : 1e30);
                report.moments.push_back(std::move(row));
            }
        }
    }

    for (const ModeSet::Entry& e : modes.modes) {
        const TestFunction fp = positive_frequency_projection(e.fn);
        Factor2Row row;
        row.mode_id = e.id;
        row.quantum = quantum_ip(fp, fp, cfg);
        row.classical = classical_ip(fp, fp, cfg);
        row.ratio = std::abs(row.classical) > 0.0 ? std::abs(row.quantum) / std::abs(row.classical)
                                                  : 0.0;
        row.residual = std::abs(row.quantum - 2.0 * row.classical);
        report.factor2.push_back(std::move(row));
    }
    return report;
}

}  // namespace shellfield
