#pragma once

#include <span>

#include "coherence/states.hpp"

namespace coherence {

/// Shannon entropy in bits; 0 log 0 := 0. Entries in [-1e-10, 0) are treated
/// as exact zeros, anything lower is a contract violation.
double shannon_entropy(std::span<const double> probs);

/// Von Neumann entropy in bits.
double von_neumann_entropy(const DensityMatrix& rho);

/// h(x) = -x log2 x - (1-x) log2 (1-x) on [0, 1].
double binary_entropy(double x);

/// Relative entropy S(rho||sigma) in bits. Infinite when the support of rho
/// escapes the support of sigma; the sentinel is explicit so no floating Inf
/// ever enters arithmetic.
struct RelEntropyResult {
    double bits = 0.0;
    bool infinite = false;
};
RelEntropyResult relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Relative entropy of coherence S(Delta(rho)) - S(rho); the distillable
/// coherence under incoherent operations.
double relative_entropy_of_coherence(const DensityMatrix& rho);

/// Quantum-incoherent relative entropy of a bipartite state,
/// S(Delta_B(rho)) - S(rho), with the dephased side chosen by b_slot.
double qi_relative_entropy(const DensityMatrix& rho, std::size_t b_slot);

/// Regularized coherence of assistance, S(Delta(rho)).
double regularized_coa(const DensityMatrix& rho);

/// Regularized entanglement of assistance of a bipartite state,
/// min{S(rho_first), S(rho_second)}.
double regularized_eoa(const DensityMatrix& rho);

/// Maximal gain in distillable coherence from a collaborating party holding
/// an extension: equals S(rho).
double assistance_gain(const DensityMatrix& rho_b);

/// Two-sided continuity check for the QI relative entropy:
/// |C(rho) - C(sigma)| <= 2 T log2(d) + 2 h(T) with T the trace distance.
/// The bound's stated regime is T <= 1/2; out-of-regime pairs are flagged,
/// not rejected.
struct ContinuityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    bool in_regime = false;
    double trace_dist = 0.0;
};
ContinuityCheck continuity_gap_check(const DensityMatrix& rho, const DensityMatrix& sigma,
                                     std::size_t b_slot);

} // namespace coherence
