#include "shellfield/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace shellfield {

SymEigen jacobi_eigen(std::vector<Real> a, int n) {
    if (n < 1 || a.size() != static_cast<size_t>(n) * static_cast<size_t>(n))
        throw std::invalid_argument("jacobi_eigen: bad dimensions");
    auto at = [&](std::vector<Real>& m, int i, int j) -> Real& {
        return m[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)];
    };
    std::vector<Real> v(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) at(v, i, i) = 1.0;

    for (int sweep = 0; sweep < 128; ++sweep) {
        Real off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(a, i, j) * at(a, i, j);
        Real diag = 0.0;
        for (int i = 0; i < n; ++i) diag += at(a, i, i) * at(a, i, i);
        if (off <= 1e-30 * std::max(diag, 1e-300)) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Real apq = at(a, p, q);
                if (apq == 0.0) continue;
                const Real theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
                const Real t = (theta >= 0.0 ? 1.0 : -1.0) /
                               (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const Real c = 1.0 / std::sqrt(t * t + 1.0);
                const Real s = t * c;
                for (int k = 0; k < n; ++k) {
                    const Real akp = at(a, k, p), akq = at(a, k, q);
                    at(a, k, p) = c * akp - s * akq;
                    at(a, k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const Real apk = at(a, p, k), aqk = at(a, q, k);
                    at(a, p, k) = c * apk - s * aqk;
                    at(a, q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const Real vkp = at(v, k, p), vkq = at(v, k, q);
                    at(v, k, p) = c * vkp - s * vkq;
                    at(v, k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    SymEigen out;
    out.n = n;
    out.values.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out.values[static_cast<size_t>(i)] = at(a, i, i);
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return out.values[static_cast<size_t>(i)] < out.values[static_cast<size_t>(j)]; });
    SymEigen sorted;
    sorted.n = n;
    sorted.values.resize(static_cast<size_t>(n));
    sorted.vectors.assign(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        sorted.values[static_cast<size_t>(j)] = out.values[static_cast<size_t>(order[static_cast<size_t>(j)])];
        for (int i = 0; i < n; ++i)
            sorted.vectors[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)] =
                at(v, i, order[static_cast<size_t>(j)]);
    }
    return sorted;
}

std::vector<Real> hermitian_embedding(const std::vector<Complex>& h, int n) {
    if (n < 1 || h.size() != static_cast<size_t>(n) * static_cast<size_t>(n))
        throw std::invalid_argument("hermitian_embedding: bad dimensions");
    const int m = 2 * n;
    std::vector<Real> e(static_cast<size_t>(m) * static_cast<size_t>(m), 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Complex z = h[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)];
            e[static_cast<size_t>(i) * static_cast<size_t>(m) + static_cast<size_t>(j)] = z.real();
            e[static_cast<size_t>(i) * static_cast<size_t>(m) + static_cast<size_t>(n + j)] = -z.imag();
            e[static_cast<size_t>(n + i) * static_cast<size_t>(m) + static_cast<size_t>(j)] = z.imag();
            e[static_cast<size_t>(n + i) * static_cast<size_t>(m) + static_cast<size_t>(n + j)] = z.real();
        }
    }
    return e;
}

}  // namespace shellfield
