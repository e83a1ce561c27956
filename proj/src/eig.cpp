#include "coherence/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coherence/errors.hpp"

namespace coherence {

namespace {

constexpr double kOffDiagonalTarget = 1e-14;
constexpr int kMaxSweeps = 100;

double offdiagonal_mass(const ComplexMatrix& a) {
    double s = 0.0;
    const std::size_t n = a.rows();
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (r != c) s += std::norm(a(r, c));
    return std::sqrt(s);
}

// One two-sided rotation zeroing a(p,q). The rotation acts on rows/columns
// p and q only and keeps the accumulated transform unitary.
void rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
    const cplx apq = a(p, q);
    const double mag = std::abs(apq);
    if (mag == 0.0) return;

    const cplx phase = apq / mag;
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();

    const double tau = (app - aqq) / (2.0 * mag);
    double t;
    if (tau >= 0.0)
        t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
    else
        t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    const std::size_t n = a.rows();
    const cplx sp = s * phase;            // s * e^{i phi}
    const cplx spc = s * std::conj(phase); // s * e^{-i phi}

    // Column update: A <- A * V_rot.
    for (std::size_t i = 0; i < n; ++i) {
        const cplx aip = a(i, p), aiq = a(i, q);
        a(i, p) = c * aip + spc * aiq;
        a(i, q) = -sp * aip + c * aiq;
    }
    // Row update: A <- V_rot^dagger * A.
    for (std::size_t j = 0; j < n; ++j) {
        const cplx apj = a(p, j), aqj = a(q, j);
        a(p, j) = c * apj + sp * aqj;
        a(q, j) = -spc * apj + c * aqj;
    }
    // The target pair is zero analytically; enforce it so rounding noise
    // cannot stall convergence.
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = cplx(a(p, p).real(), 0.0);
    a(q, q) = cplx(a(q, q).real(), 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const cplx vip = v(i, p), viq = v(i, q);
        v(i, p) = c * vip + spc * viq;
        v(i, q) = -sp * vip + c * viq;
    }
}

void canonicalize_column_phase(ComplexMatrix& v, std::size_t col) {
    const std::size_t n = v.rows();
    std::size_t pivot = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = std::abs(v(i, col));
        if (m > best + 1e-15) {
            best = m;
            pivot = i;
        }
    }
    if (best <= 0.0) return;
    const cplx ph = std::conj(v(pivot, col)) / best;
    for (std::size_t i = 0; i < n; ++i) v(i, col) *= ph;
}

} // namespace

Spectrum hermitian_eig(const ComplexMatrix& input) {
    if (input.rows() != input.cols())
        throw contract_violation("hermitian_eig: matrix is not square");
    if (!input.all_finite())
        throw contract_violation("hermitian_eig: matrix has non-finite entries");
    if (!input.is_hermitian(1e-8))
        throw contract_violation("hermitian_eig: matrix is not Hermitian within 1e-8");

    const std::size_t n = input.rows();
    ComplexMatrix a = input;
    // Symmetrize exactly so rounding asymmetry in the input cannot leak in.
    for (std::size_t r = 0; r < n; ++r) {
        a(r, r) = cplx(a(r, r).real(), 0.0);
        for (std::size_t c = r + 1; c < n; ++c) {
            const cplx m = 0.5 * (a(r, c) + std::conj(a(c, r)));
            a(r, c) = m;
            a(c, r) = std::conj(m);
        }
    }

    ComplexMatrix v = ComplexMatrix::identity(n);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (offdiagonal_mass(a) < kOffDiagonalTarget) break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                rotate(a, v, p, q);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() > a(y, y).real(); });

    Spectrum out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
        canonicalize_column_phase(out.eigenvectors, k);
    }
    return out;
}

} // namespace coherence
