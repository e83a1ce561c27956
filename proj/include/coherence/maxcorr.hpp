#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "coherence/channels.hpp"
#include "coherence/states.hpp"

namespace coherence {

/// Bipartite state split into operator blocks along one subsystem's basis:
/// rho = sum_ij M_ij (x) |i><j| when the indexed slot is second, and
/// rho = sum_ij |i><j| (x) M_ij when it is first.
struct BlockDecomposition {
    std::size_t a_dim = 0;      // dimension the blocks act on
    std::size_t b_dim = 0;      // dimension of the indexing subsystem
    std::size_t index_slot = 0; // which subsystem carries the |i><j| factor
    std::vector<ComplexMatrix> blocks;

    const ComplexMatrix& block(std::size_t i, std::size_t j) const {
        return blocks[i * b_dim + j];
    }
};

BlockDecomposition extract_blocks(const DensityMatrix& rho, std::size_t index_slot);
DensityMatrix reassemble(const BlockDecomposition& dec);

/// Image of a single-party state under rho_ij |i><j| -> rho_ij |ii><jj|.
DensityMatrix to_maximally_correlated(const DensityMatrix& rho);

/// Tripartite companion of a bipartite state: the indexed subsystem B gains a
/// same-dimension copy C, M_ij (x) |i><j| -> M_ij (x) |ii><jj|. Output
/// subsystems are ordered (A, B, C) regardless of the input order.
DensityMatrix lift_bipartite(const DensityMatrix& rho, std::size_t b_slot);

/// Record of one incoherent-channel outcome replayed on the lifted state:
/// Kraus branch q_alpha, matched against the direct branch probability
/// p_alpha, the conditional success of the correlation-restoring measurement,
/// and the resulting tripartite state.
struct SloccTrace {
    std::size_t alpha = 0;
    double p_alpha = 0.0;
    double q_alpha = 0.0;
    double success_prob = 0.0;
    DensityMatrix final_state;
    bool deterministic_path = false;
    bool aborted = false;
};

/// Replays outcome alpha of an incoherent channel on B of the lifted state:
/// Kraus branch, ancilla relabeling unitary, then projection of the ancilla
/// onto the uniform vector. A bijective index map skips the ancilla round
/// trip: a single relabeling unitary on the copy succeeds with certainty.
/// Branches impossible on the bipartite side (p_alpha ~ 0) are reported as
/// aborted rather than rejected. B must be the second subsystem.
SloccTrace simulate_slocc_step(const DensityMatrix& omega, const IncoherentChannel& ch,
                               std::size_t alpha);

/// One measurement round on A (arbitrary complete Kraus set, may be empty)
/// followed by one incoherent round on B, each branch replayed on the lifted
/// state. Returned traces carry joint probabilities, so p_alpha sums to one
/// across branches.
std::vector<SloccTrace> simulate_lqicc_round_trip(const DensityMatrix& rho,
                                                  const std::vector<ComplexMatrix>& alice_kraus,
                                                  const std::optional<IncoherentChannel>& bob_ch);

/// One round of a protocol: a quantum operation on A or an incoherent one
/// on B, with the outcome classically broadcast.
struct ProtocolStep {
    char party = 'A'; // 'A' or 'B'
    std::vector<ComplexMatrix> kraus;
};

inline constexpr std::size_t kProtocolDepthCap = 8;

/// One realized branch of a protocol run.
struct ProtocolNode {
    std::string path; // outcome indices joined with '/', e.g. "0/2/1"
    std::size_t depth = 0;
    char party = 'A';
    std::size_t outcome_index = 0;
    double probability = 0.0; // joint probability of reaching this node
    SloccTrace trace;         // step-level record; final_state is the lifted post state
    DensityMatrix state;      // bipartite post state, carried for further rounds
};

/// Exhaustive branch-by-branch walk of a protocol (at most kProtocolDepthCap
/// steps), returning every node of the outcome tree in deterministic order.
/// Probabilities are exact; nothing is sampled.
std::vector<ProtocolNode> run_protocol_tree(const DensityMatrix& rho,
                                            const std::vector<ProtocolStep>& steps);

} // namespace coherence
