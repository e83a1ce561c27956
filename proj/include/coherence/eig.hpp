#pragma once

#include <vector>

#include "coherence/complex_matrix.hpp"

namespace coherence {

/// Eigensystem of a Hermitian matrix: eigenvalues sorted descending,
/// eigenvectors as the matching unitary column table.
struct Spectrum {
    std::vector<double> eigenvalues;
    ComplexMatrix eigenvectors;
};

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
///
/// Sweeps run in a fixed cyclic order until the Frobenius mass of the
/// off-diagonal part drops below 1e-14, with a hard cap of 100 sweeps, so the
/// result is deterministic for identical input. Column phases are fixed by
/// making the largest-magnitude component of each eigenvector real positive.
///
/// Throws contract_violation for non-square input or when the input deviates
/// from Hermitian symmetry by more than 1e-8.
Spectrum hermitian_eig(const ComplexMatrix& a);

} // namespace coherence
