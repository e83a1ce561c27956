#include "coherence/states.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "coherence/eig.hpp"
#include "coherence/errors.hpp"

namespace coherence {

std::size_t total_dimension(const std::vector<std::size_t>& dims) {
    if (dims.empty()) throw contract_violation("state: dims must be non-empty");
    std::size_t d = 1;
    for (std::size_t x : dims) {
        if (x < 1) throw contract_violation("state: every subsystem dimension must be >= 1");
        d *= x;
    }
    return d;
}

DensityMatrix DensityMatrix::make(std::vector<std::size_t> dims, ComplexMatrix mat) {
    const std::size_t d = total_dimension(dims);
    if (mat.rows() != d || mat.cols() != d) {
        std::ostringstream os;
        os << "density matrix: side " << mat.rows() << "x" << mat.cols()
           << " does not match product of dims " << d;
        throw contract_violation(os.str());
    }
    if (!mat.all_finite())
        throw contract_violation("density matrix: non-finite entries");
    if (!mat.is_hermitian(kHermiticityTol))
        throw contract_violation("density matrix: not Hermitian within 1e-10");
    if (std::abs(mat.trace() - cplx(1.0)) > kTraceTol)
        throw contract_violation("density matrix: trace differs from 1 by more than 1e-10");
    const Spectrum spec = hermitian_eig(mat);
    if (spec.eigenvalues.back() < kPsdFloor)
        throw contract_violation("density matrix: negative eigenvalue below the -1e-10 floor");
    return trusted(std::move(dims), std::move(mat));
}

DensityMatrix DensityMatrix::trusted(std::vector<std::size_t> dims, ComplexMatrix mat) {
    DensityMatrix rho;
    rho.dims_ = std::move(dims);
    rho.mat_ = std::move(mat);
    return rho;
}

PureState PureState::make(std::vector<std::size_t> dims, std::vector<cplx> vec) {
    const std::size_t d = total_dimension(dims);
    if (vec.size() != d)
        throw contract_violation("pure state: vector length does not match product of dims");
    for (const cplx& z : vec)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw contract_violation("pure state: non-finite entries");
    if (std::abs(norm(vec) - 1.0) > kNormTol)
        throw contract_violation("pure state: norm differs from 1 by more than 1e-10");
    return trusted(std::move(dims), std::move(vec));
}

PureState PureState::trusted(std::vector<std::size_t> dims, std::vector<cplx> vec) {
    PureState psi;
    psi.dims_ = std::move(dims);
    psi.vec_ = std::move(vec);
    return psi;
}

PureState PureState::basis_state(std::vector<std::size_t> dims, std::size_t index) {
    const std::size_t d = total_dimension(dims);
    if (index >= d) throw contract_violation("basis_state: index out of range");
    std::vector<cplx> v(d, 0.0);
    v[index] = 1.0;
    return trusted(std::move(dims), std::move(v));
}

DensityMatrix PureState::density() const {
    const std::size_t d = dim();
    ComplexMatrix m(d, d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c)
            m(r, c) = vec_[r] * std::conj(vec_[c]);
    return DensityMatrix::trusted(dims_, std::move(m));
}

double norm(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const cplx& z : v) s += std::norm(z);
    return std::sqrt(s);
}

cplx inner_product(const std::vector<cplx>& bra, const std::vector<cplx>& ket) {
    if (bra.size() != ket.size()) throw contract_violation("inner_product: length mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < bra.size(); ++i) s += std::conj(bra[i]) * ket[i];
    return s;
}

} // namespace coherence
