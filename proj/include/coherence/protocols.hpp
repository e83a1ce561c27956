#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <utility>

#include "coherence/channels.hpp"
#include "coherence/roof.hpp"
#include "coherence/states.hpp"

namespace coherence {

/// True iff the bipartite state is quantum-incoherent on the chosen side,
/// i.e. dephasing that subsystem leaves the state unchanged within 1e-10.
bool is_qi_state(const DensityMatrix& rho, std::size_t b_slot);

/// Certificate that a bipartite state is a resource for assisted
/// distillation: a von Neumann basis for the assisting side together with an
/// outcome whose post state on the target side is coherent.
struct WitnessResult {
    bool found = false;
    ComplexMatrix alice_basis; // unitary columns; outcome_index selects one
    std::optional<MeasurementOutcome> outcome;
    double coherence_bits = 0.0;
};

/// Searches for a witness measurement. Quantum-incoherent input reports
/// found = false. Otherwise either some diagonal block is already coherent
/// (measure in the computational basis) or an off-diagonal block is, in which
/// case rotated two-level bases at theta_points grid angles are tried with
/// both real and imaginary relative phases and the best probability-times-
/// coherence outcome wins.
WitnessResult find_coherence_witness(const DensityMatrix& rho, std::size_t b_slot,
                                     std::size_t theta_points = 15);

/// Orthonormal pair eta_+/- mutually unbiased to both inputs:
/// |<eta|psi_k>|^2 = 1/2. Built inside span{psi_0, psi_1} via the Bloch cross
/// product; degenerate spans fall back to a fixed equatorial choice.
std::pair<PureState, PureState> mub_for_two_states(const PureState& psi0, const PureState& psi1);

struct AssistanceRun {
    std::array<MeasurementOutcome, 2> outcomes;
    double achieved_bits = 0.0;
};

/// Optimal single-copy assistance for a pure state with a qubit target:
/// measuring the assisting side in the mutually unbiased basis leaves the
/// target with coherence equal to the entropy of its dephased marginal, for
/// either outcome. The assisting side must have dimension at least 2.
AssistanceRun qubit_assistance_protocol(const PureState& psi, std::size_t b_slot);

/// Fixed 2x4 pure state separating single-copy assistance from its
/// regularization, with machine-checked evidence.
struct NonadditivityCertificate {
    PureState state;
    bool forced_zero = false;
    RoofResult ca_report;
};

/// Builds the counterexample state, certifies by rank analysis that no POVM
/// element on the assisting qubit can leave the target maximally coherent,
/// and records the optimizer's best single-copy assistance value (strictly
/// below the regularized value of 2).
NonadditivityCertificate nonadditivity_certificate(const RoofConfig& config = {});

struct LocalizationRun {
    double rate_bits = 0.0;
    std::array<MeasurementOutcome, 2> outcomes;
};

/// Multipartite coherence localization onto a qubit target: all assisting
/// parties are grouped into one and the grouped assistance protocol runs on
/// the result.
LocalizationRun localize_coherence(const PureState& psi, std::size_t b_slot);

} // namespace coherence
