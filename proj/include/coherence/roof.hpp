#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "coherence/rng.hpp"
#include "coherence/states.hpp"

namespace coherence {

/// Pure-state decomposition of a density matrix.
struct EnsembleMember {
    double probability = 0.0;
    PureState state;
};

struct Ensemble {
    std::vector<EnsembleMember> members;
    std::vector<std::size_t> source_dims;
};

/// Max-abs deviation of sum_i q_i |psi_i><psi_i| from the target.
double ensemble_defect(const Ensemble& ensemble, const DensityMatrix& target);

/// Matrix with orthonormal columns; the parameter space of the decomposition
/// freedom explored by the roof optimizer.
struct IsometryParam {
    ComplexMatrix matrix;

    /// Validating factory: columns must be orthonormal within 1e-10.
    static IsometryParam make(ComplexMatrix m);
    /// Haar-random sample via QR of a Ginibre matrix.
    static IsometryParam haar(std::size_t m, std::size_t r, SplitMix64& rng);
};

struct RoofConfig {
    std::size_t restarts = 32;
    std::size_t ensemble_cap = 0; // 0: use rank^2
    double tol = 1e-9;
    std::uint64_t seed = kDefaultSeed;
    std::size_t max_sweeps = 64;
};

enum class RoofDirection { maximize, minimize };

struct RoofResult {
    double value = 0.0;
    Ensemble ensemble;
    std::size_t restarts_used = 0;
    bool converged = false;
    std::vector<double> best_history; // per-restart optimum
};

/// Objective evaluated on a normalized pure state given as its amplitude
/// span; the subsystem structure is whatever the caller closed over.
using PureObjective = std::function<double(std::span<const cplx>)>;

/// Extremal average of a pure-state functional over decompositions of rho.
///
/// Ensembles are parameterized as rows of V * P where P stacks the weighted
/// eigenvectors sqrt(lambda_k) v_k and V is an isometry with ensemble_cap
/// rows. Restart 0 starts from the eigendecomposition itself (so a
/// maximization never reports less than the trivial ensemble); further
/// restarts start from Haar-random isometries seeded with seed + restart
/// index. Each restart runs sweeps of two-row rotations, every pair tuned by
/// a 64-point grid plus golden-section refinement over rotation angle and
/// relative phase, until one full sweep improves by less than tol.
RoofResult roof_optimize(const DensityMatrix& rho, const PureObjective& objective,
                         RoofDirection direction, const RoofConfig& config = {});

/// Concave roof of S(Delta(.)): the coherence of assistance.
RoofResult coherence_of_assistance(const DensityMatrix& rho, const RoofConfig& config = {});

/// Convex roof of S(Delta(.)): the coherence of formation.
RoofResult coherence_of_formation(const DensityMatrix& rho, const RoofConfig& config = {});

/// Concave roof of the entanglement entropy over decompositions of a
/// bipartite state: the entanglement of assistance.
RoofResult entanglement_of_assistance(const DensityMatrix& rho, const RoofConfig& config = {});

} // namespace coherence
