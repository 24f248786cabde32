#pragma once

#include <vector>

#include "shellfield/geometry.hpp"

namespace shellfield {

// Eigendecomposition of a dense real symmetric matrix (row-major) by
// cyclic Jacobi sweeps; adequate for the small mode-set matrices used
// here (n up to a few dozen).
struct SymEigen {
    int n = 0;
    std::vector<Real> values;   // ascending
    std::vector<Real> vectors;  // row-major; column j = eigenvector of values[j]
};

SymEigen jacobi_eigen(std::vector<Real> a, int n);

// Real symmetric embedding [[Re, -Im], [Im, Re]] of a complex Hermitian
// matrix (row-major); its spectrum is that of the Hermitian matrix with
// every eigenvalue doubled in multiplicity.
std::vector<Real> hermitian_embedding(const std::vector<Complex>& h, int n);

}  // namespace shellfield
