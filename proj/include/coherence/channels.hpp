#pragma once

#include <cstddef>
#include <vector>

#include "coherence/rng.hpp"
#include "coherence/states.hpp"

namespace coherence {

/// One branch of a quantum measurement or instrument.
struct MeasurementOutcome {
    std::size_t outcome_index = 0;
    double probability = 0.0;
    DensityMatrix post_state; // empty when probability is below 1e-12
};

/// Channel whose Kraus operators each have at most one nonzero entry per
/// column, K_a = sum_i c_{a,i} |f_a(i)><i|, so incoherent inputs stay
/// incoherent. coeffs and maps store the extracted c and f tables; columns
/// that are entirely zero keep f(i) = i with coefficient 0.
struct IncoherentChannel {
    std::vector<ComplexMatrix> kraus;
    std::vector<std::vector<cplx>> coeffs;
    std::vector<std::vector<std::size_t>> maps;

    std::size_t dim() const { return kraus.empty() ? 0 : kraus.front().rows(); }
    std::size_t size() const { return kraus.size(); }
    bool map_is_bijective(std::size_t alpha) const;
};

/// Single ingestion point for channels: verifies trace preservation and the
/// one-nonzero-per-column structure, extracting the coefficient and index
/// tables. Throws contract_violation naming the offending operator otherwise.
IncoherentChannel validate_incoherent(std::vector<ComplexMatrix> kraus);

/// Applies the channel to one subsystem as a measurement instrument: one
/// outcome per Kraus operator with probability Tr[K rho K^dagger] and the
/// normalized post state.
std::vector<MeasurementOutcome> apply_channel(const DensityMatrix& rho,
                                              const IncoherentChannel& ch, std::size_t slot);

/// Von Neumann measurement of one subsystem in the basis given by unitary
/// columns; post states live on the remaining subsystems.
std::vector<MeasurementOutcome> measure_von_neumann(const DensityMatrix& rho,
                                                    const ComplexMatrix& basis, std::size_t slot);

/// Lifts an operator acting on one subsystem to the full space.
ComplexMatrix embed_at_slot(const ComplexMatrix& op, const std::vector<std::size_t>& dims,
                            std::size_t slot);

/// Seeded random incoherent channel: a probabilistic mixture of components,
/// each built from one random index map and a Haar unitary supplying the
/// per-outcome coefficient columns, so completeness holds exactly even when
/// the map merges levels.
IncoherentChannel random_incoherent_channel(std::size_t dim, std::size_t components,
                                            SplitMix64& rng);

} // namespace coherence
