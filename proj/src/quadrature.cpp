#include "shellfield/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace shellfield {

std::vector<QuadNode> gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    std::vector<QuadNode> out(static_cast<size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        Real x = std::cos(kPi * (static_cast<Real>(i) + 0.75) / (static_cast<Real>(n) + 0.5));
        Real dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            Real p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const Real p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<Real>(k);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<Real>(n) * (x * p1 - p0) / (x * x - 1.0);
            const Real dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        const Real w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[static_cast<size_t>(i)] = {-x, w};
        out[static_cast<size_t>(n - 1 - i)] = {x, w};
    }
    if (n % 2 == 1) out[static_cast<size_t>(n / 2)].x = 0.0;
    return out;
}

std::vector<QuadNode> composite_gauss(Real lo, Real hi, int panels) {
    if (panels < 1) throw std::invalid_argument("composite_gauss: panels must be positive");
    static const std::vector<QuadNode> base = gauss_legendre(16);
    std::vector<QuadNode> out;
    out.reserve(static_cast<size_t>(panels) * base.size());
    const Real h = (hi - lo) / static_cast<Real>(panels);
    for (int p = 0; p < panels; ++p) {
        const Real a = lo + h * static_cast<Real>(p);
        const Real mid = a + 0.5 * h;
        for (const QuadNode& q : base) out.push_back({mid + 0.5 * h * q.x, 0.5 * h * q.w});
    }
    return out;
}

std::vector<QuadNode> midpoint_rule(Real lo, Real hi, int n) {
    if (n < 1) throw std::invalid_argument("midpoint_rule: n must be positive");
    std::vector<QuadNode> out;
    out.reserve(static_cast<size_t>(n));
    const Real h = (hi - lo) / static_cast<Real>(n);
    for (int i = 0; i < n; ++i) out.push_back({lo + h * (static_cast<Real>(i) + 0.5), h});
    return out;
}

}  // namespace shellfield
