#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "coherence/states.hpp"

namespace coherence {

/// Strides of a row-major multi-index: first dims entry is slowest-varying.
std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
PureState tensor(const PureState& a, const PureState& b);

/// Traces out every subsystem not listed in keep; resulting dims preserve the
/// original order restricted to keep. keep must be non-empty.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& keep);

/// Zeroes every matrix element whose multi-index differs on any of the listed
/// subsystems. Idempotent; dephasing every subsystem yields an exactly
/// diagonal matrix.
DensityMatrix dephase(const DensityMatrix& rho, const std::vector<std::size_t>& subsystems);

/// Full dephasing over all subsystems.
DensityMatrix dephase(const DensityMatrix& rho);

/// Canonical purification built from the spectrum: a two-subsystem pure state
/// with dims (rank, d) whose ancilla basis enumerates the eigenbasis, so that
/// tracing out the first slot reproduces rho.
PureState purify(const DensityMatrix& rho);

/// Half the trace norm of rho - sigma. Lies in [0, 1].
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Outcome of projecting one subsystem onto a unit vector: the outcome
/// probability and the normalized state of the remaining subsystems.
/// Probability below cutoff yields an empty post state.
std::pair<double, DensityMatrix> project_subsystem(const DensityMatrix& rho, std::size_t slot,
                                                   const std::vector<cplx>& vec);

/// Reorders subsystems: position k of the result is subsystem perm[k] of psi.
PureState permute_subsystems(const PureState& psi, const std::vector<std::size_t>& perm);
DensityMatrix permute_subsystems(const DensityMatrix& rho, const std::vector<std::size_t>& perm);

/// Flattens a multipartite pure state into (rest, slot) with the chosen
/// subsystem last and all remaining subsystems grouped in original order.
PureState group_to_bipartite(const PureState& psi, std::size_t slot);

} // namespace coherence
