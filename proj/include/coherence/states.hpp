#pragma once

#include <cstddef>
#include <vector>

#include "coherence/complex_matrix.hpp"

namespace coherence {

// Tolerances shared by every public entry point that ingests states.
inline constexpr double kHermiticityTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdFloor = -1e-10;
inline constexpr double kNormTol = 1e-10;
inline constexpr double kSupportCutoff = 1e-12;

std::size_t total_dimension(const std::vector<std::size_t>& dims);

/// Hermitian, PSD, unit-trace matrix over a tensor product of subsystems.
/// The first entry of dims is the slowest-varying index. The incoherent
/// reference basis of every subsystem is its computational basis.
class DensityMatrix {
public:
    DensityMatrix() = default;

    /// Validating factory: checks Hermiticity (1e-10), unit trace (1e-10)
    /// and positive semidefiniteness (eigenvalues >= -1e-10).
    static DensityMatrix make(std::vector<std::size_t> dims, ComplexMatrix mat);

    /// Non-validating constructor for results that are valid by construction
    /// (partial traces, dephasings, channel outputs, ...).
    static DensityMatrix trusted(std::vector<std::size_t> dims, ComplexMatrix mat);

    const std::vector<std::size_t>& dims() const { return dims_; }
    const ComplexMatrix& mat() const { return mat_; }
    std::size_t dim() const { return mat_.rows(); }
    std::size_t subsystem_count() const { return dims_.size(); }

private:
    std::vector<std::size_t> dims_;
    ComplexMatrix mat_;
};

/// Unit vector over a tensor product of subsystems.
class PureState {
public:
    PureState() = default;

    /// Validating factory: checks unit norm within 1e-10.
    static PureState make(std::vector<std::size_t> dims, std::vector<cplx> vec);
    static PureState trusted(std::vector<std::size_t> dims, std::vector<cplx> vec);

    /// Computational basis vector |index> on the given dims.
    static PureState basis_state(std::vector<std::size_t> dims, std::size_t index);

    const std::vector<std::size_t>& dims() const { return dims_; }
    const std::vector<cplx>& vec() const { return vec_; }
    std::size_t dim() const { return vec_.size(); }

    /// Outer product |psi><psi| as a density matrix.
    DensityMatrix density() const;

private:
    std::vector<std::size_t> dims_;
    std::vector<cplx> vec_;
};

double norm(const std::vector<cplx>& v);
cplx inner_product(const std::vector<cplx>& bra, const std::vector<cplx>& ket);

} // namespace coherence
