#include "coherence/rng.hpp"

#include <cmath>
#include <numbers>

#include "coherence/errors.hpp"
#include "coherence/linalg.hpp"

namespace coherence {

double SplitMix64::next_normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = 1.0 - next_double(); // (0, 1]
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

ComplexMatrix ginibre(std::size_t rows, std::size_t cols, SplitMix64& rng) {
    ComplexMatrix g(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) g(r, c) = rng.next_complex_normal();
    return g;
}

ComplexMatrix haar_isometry(std::size_t m, std::size_t r, SplitMix64& rng) {
    if (r > m) throw contract_violation("haar_isometry: need m >= r");
    ComplexMatrix g = ginibre(m, r, rng);
    // Modified Gram-Schmidt; positive diagonal of R keeps the column
    // distribution Haar.
    for (std::size_t c = 0; c < r; ++c) {
        for (std::size_t prev = 0; prev < c; ++prev) {
            cplx overlap = 0.0;
            for (std::size_t i = 0; i < m; ++i) overlap += std::conj(g(i, prev)) * g(i, c);
            for (std::size_t i = 0; i < m; ++i) g(i, c) -= overlap * g(i, prev);
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < m; ++i) nrm += std::norm(g(i, c));
        nrm = std::sqrt(nrm);
        if (nrm < 1e-12) throw contract_violation("haar_isometry: degenerate Gaussian sample");
        for (std::size_t i = 0; i < m; ++i) g(i, c) /= nrm;
    }
    return g;
}

ComplexMatrix haar_unitary(std::size_t n, SplitMix64& rng) { return haar_isometry(n, n, rng); }

PureState random_pure(const std::vector<std::size_t>& dims, SplitMix64& rng) {
    const std::size_t d = total_dimension(dims);
    std::vector<cplx> v(d);
    for (cplx& z : v) z = rng.next_complex_normal();
    const double n = norm(v);
    for (cplx& z : v) z /= n;
    return PureState::trusted(dims, std::move(v));
}

DensityMatrix random_density(const std::vector<std::size_t>& dims, std::size_t rank,
                             SplitMix64& rng) {
    const std::size_t d = total_dimension(dims);
    if (rank < 1 || rank > d)
        throw contract_violation("random_density: rank must lie in [1, dim]");
    const PureState purified = random_pure({d, rank}, rng);
    DensityMatrix rho = partial_trace(purified.density(), {0});
    // Exact symmetrization; the partial trace is Hermitian only up to rounding.
    ComplexMatrix m = rho.mat();
    for (std::size_t r = 0; r < d; ++r) {
        m(r, r) = cplx(m(r, r).real(), 0.0);
        for (std::size_t c = r + 1; c < d; ++c) {
            const cplx avg = 0.5 * (m(r, c) + std::conj(m(c, r)));
            m(r, c) = avg;
            m(c, r) = std::conj(avg);
        }
    }
    return DensityMatrix::trusted(dims, std::move(m));
}

ComplexMatrix random_hermitian(std::size_t n, SplitMix64& rng) {
    ComplexMatrix g = ginibre(n, n, rng);
    ComplexMatrix h(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) h(r, c) = 0.5 * (g(r, c) + std::conj(g(c, r)));
    return h;
}

} // namespace coherence
