#pragma once

#include <cstddef>
#include <vector>

#include "shellfield/geometry.hpp"

namespace shellfield {

struct QuadNode {
    Real x;
    Real w;
};

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
// by Newton iteration on the Legendre recurrence.
std::vector<QuadNode> gauss_legendre(int n);

// Composite quadrature on [lo, hi]: `panels` equal panels with a fixed
// 16-point Gauss-Legendre rule per panel. Node count = 16 * panels and
// the node set is open (never contains lo, hi, or panel boundaries).
std::vector<QuadNode> composite_gauss(Real lo, Real hi, int panels);

// Open trapezoid-style rule: n uniform cells, nodes at cell midpoints.
// Used for the `trapezoid` quadrature option; midpoints keep the rule
// open so the massless d = 2 shell never evaluates at k = 0.
std::vector<QuadNode> midpoint_rule(Real lo, Real hi, int n);

// Kahan compensated accumulator for complex node sums.
class KahanSum {
  public:
    void add(Complex v) {
        add_part(re_, re_c_, v.real());
        add_part(im_, im_c_, v.imag());
    }
    Complex value() const { return {re_, im_}; }

  private:
    static void add_part(Real& s, Real& c, Real v) {
        const Real y = v - c;
        const Real t = s + y;
        c = (t - s) - y;
        s = t;
    }
    Real re_ = 0.0, re_c_ = 0.0;
    Real im_ = 0.0, im_c_ = 0.0;
};

}  // namespace shellfield
