#pragma once

#include <cstdint>

#include "coherence/states.hpp"

namespace coherence {

/// Default seed used across the toolkit when none is given.
inline constexpr std::uint64_t kDefaultSeed = 3405691582ULL;

/// SplitMix64: the 64-bit counter-based generator all sampling goes through.
/// Chosen so a seed fully determines every sample on any platform; normal
/// deviates come from an explicit Box-Muller transform for the same reason.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal deviate (Box-Muller, pair cached).
    double next_normal();

    /// Complex Gaussian with unit-variance real and imaginary parts.
    cplx next_complex_normal() {
        const double re = next_normal();
        const double im = next_normal();
        return {re, im};
    }

private:
    std::uint64_t state_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

/// Matrix with independent complex Gaussian entries.
ComplexMatrix ginibre(std::size_t rows, std::size_t cols, SplitMix64& rng);

/// Haar-distributed isometry (m x r, orthonormal columns) via Gram-Schmidt
/// on a Ginibre sample.
ComplexMatrix haar_isometry(std::size_t m, std::size_t r, SplitMix64& rng);

ComplexMatrix haar_unitary(std::size_t n, SplitMix64& rng);

/// Haar-random pure state: normalized complex Gaussian vector.
PureState random_pure(const std::vector<std::size_t>& dims, SplitMix64& rng);

/// Rank-r mixed state: partial trace over an r-dimensional ancilla of a Haar
/// pure state on dims x r.
DensityMatrix random_density(const std::vector<std::size_t>& dims, std::size_t rank,
                             SplitMix64& rng);

/// Random Hermitian matrix (G + G^dagger)/2 with Ginibre G.
ComplexMatrix random_hermitian(std::size_t n, SplitMix64& rng);

} // namespace coherence
