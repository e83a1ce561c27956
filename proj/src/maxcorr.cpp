#include "coherence/maxcorr.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "coherence/errors.hpp"
#include "coherence/linalg.hpp"

namespace coherence {

namespace {

constexpr double kAbortCutoff = 1e-14;

void require_bipartite(const DensityMatrix& rho, const char* who) {
    if (rho.subsystem_count() != 2)
        throw contract_violation(std::string(who) + ": state must be bipartite");
}

DensityMatrix symmetrized(std::vector<std::size_t> dims, ComplexMatrix m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        m(r, r) = cplx(m(r, r).real(), 0.0);
        for (std::size_t c = r + 1; c < m.cols(); ++c) {
            const cplx avg = 0.5 * (m(r, c) + std::conj(m(c, r)));
            m(r, c) = avg;
            m(c, r) = std::conj(avg);
        }
    }
    return DensityMatrix::trusted(std::move(dims), std::move(m));
}

/// Unitary on C (x) ancilla mapping |i, 0> to |f(i), i>; the action on the
/// remaining basis vectors is completed to any fixed permutation.
ComplexMatrix relabeling_unitary(const std::vector<std::size_t>& f, std::size_t d) {
    const std::size_t dd = d * d;
    std::vector<bool> used(dd, false);
    std::vector<std::size_t> target(dd);
    for (std::size_t i = 0; i < d; ++i) {
        const std::size_t out = f[i] * d + i;
        target[i * d + 0] = out;
        used[out] = true;
    }
    std::size_t spare = 0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 1; j < d; ++j) {
            while (used[spare]) ++spare;
            target[i * d + j] = spare;
            used[spare] = true;
        }
    ComplexMatrix u(dd, dd);
    for (std::size_t col = 0; col < dd; ++col) u(target[col], col) = 1.0;
    return u;
}

} // namespace

BlockDecomposition extract_blocks(const DensityMatrix& rho, std::size_t index_slot) {
    require_bipartite(rho, "extract_blocks");
    if (index_slot >= 2) throw contract_violation("extract_blocks: index_slot out of range");

    BlockDecomposition dec;
    dec.index_slot = index_slot;
    dec.b_dim = rho.dims()[index_slot];
    dec.a_dim = rho.dims()[1 - index_slot];

    const std::size_t d1 = rho.dims()[1];
    dec.blocks.reserve(dec.b_dim * dec.b_dim);
    for (std::size_t i = 0; i < dec.b_dim; ++i)
        for (std::size_t j = 0; j < dec.b_dim; ++j) {
            ComplexMatrix m(dec.a_dim, dec.a_dim);
            for (std::size_t r = 0; r < dec.a_dim; ++r)
                for (std::size_t c = 0; c < dec.a_dim; ++c) {
                    if (index_slot == 1)
                        m(r, c) = rho.mat()(r * d1 + i, c * d1 + j);
                    else
                        m(r, c) = rho.mat()(i * d1 + r, j * d1 + c);
                }
            dec.blocks.push_back(std::move(m));
        }
    return dec;
}

DensityMatrix reassemble(const BlockDecomposition& dec) {
    const std::size_t da = dec.a_dim, db = dec.b_dim;
    const std::size_t d = da * db;
    ComplexMatrix out(d, d);
    for (std::size_t i = 0; i < db; ++i)
        for (std::size_t j = 0; j < db; ++j) {
            const ComplexMatrix& m = dec.block(i, j);
            for (std::size_t r = 0; r < da; ++r)
                for (std::size_t c = 0; c < da; ++c) {
                    if (dec.index_slot == 1)
                        out(r * db + i, c * db + j) = m(r, c);
                    else
                        out(i * da + r, j * da + c) = m(r, c);
                }
        }
    std::vector<std::size_t> dims = dec.index_slot == 1 ? std::vector<std::size_t>{da, db}
                                                        : std::vector<std::size_t>{db, da};
    return DensityMatrix::trusted(std::move(dims), std::move(out));
}

DensityMatrix to_maximally_correlated(const DensityMatrix& rho) {
    if (rho.subsystem_count() != 1)
        throw contract_violation("to_maximally_correlated: state must be single-party");
    const std::size_t d = rho.dim();
    ComplexMatrix out(d * d, d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) out(i * d + i, j * d + j) = rho.mat()(i, j);
    return DensityMatrix::trusted({d, d}, std::move(out));
}

DensityMatrix lift_bipartite(const DensityMatrix& rho, std::size_t b_slot) {
    require_bipartite(rho, "lift_bipartite");
    if (b_slot >= 2) throw contract_violation("lift_bipartite: b_slot out of range");
    const DensityMatrix ordered = b_slot == 1 ? rho : permute_subsystems(rho, {1, 0});

    const BlockDecomposition dec = extract_blocks(ordered, 1);
    const std::size_t da = dec.a_dim, db = dec.b_dim;
    const std::size_t d = da * db * db;
    ComplexMatrix out(d, d);
    for (std::size_t i = 0; i < db; ++i)
        for (std::size_t j = 0; j < db; ++j) {
            const ComplexMatrix& m = dec.block(i, j);
            for (std::size_t r = 0; r < da; ++r)
                for (std::size_t c = 0; c < da; ++c)
                    out(r * db * db + i * db + i, c * db * db + j * db + j) = m(r, c);
        }
    return DensityMatrix::trusted({da, db, db}, std::move(out));
}

SloccTrace simulate_slocc_step(const DensityMatrix& omega, const IncoherentChannel& ch,
                               std::size_t alpha) {
    require_bipartite(omega, "simulate_slocc_step");
    const std::size_t db = omega.dims()[1];
    if (ch.dim() != db)
        throw contract_violation("simulate_slocc_step: channel does not match B dimension");
    if (alpha >= ch.size()) throw contract_violation("simulate_slocc_step: outcome out of range");

    const std::vector<cplx>& c = ch.coeffs[alpha];
    const std::vector<std::size_t>& f = ch.maps[alpha];

    // Branch probability on the bipartite side, evaluated from the blocks:
    // p = sum over index pairs with matching relabeled targets.
    const BlockDecomposition dec = extract_blocks(omega, 1);
    cplx p_acc = 0.0;
    for (std::size_t i = 0; i < db; ++i)
        for (std::size_t j = 0; j < db; ++j)
            if (f[i] == f[j]) p_acc += c[i] * std::conj(c[j]) * dec.block(i, j).trace();
    const double p_alpha = std::max(p_acc.real(), 0.0);

    // Kraus branch on B of the lifted state.
    const DensityMatrix lifted = lift_bipartite(omega, 1);
    const ComplexMatrix k_full = embed_at_slot(ch.kraus[alpha], lifted.dims(), 1);
    ComplexMatrix branch = k_full * lifted.mat() * k_full.adjoint();
    const double q_alpha = std::max(branch.trace().real(), 0.0);

    SloccTrace trace;
    trace.alpha = alpha;
    trace.p_alpha = p_alpha;
    trace.q_alpha = q_alpha;

    if (p_alpha <= kAbortCutoff || q_alpha <= kAbortCutoff) {
        trace.aborted = true;
        trace.success_prob = 0.0;
        trace.final_state = lifted;
        return trace;
    }

    branch *= cplx(1.0 / q_alpha);
    const DensityMatrix tau = symmetrized(lifted.dims(), std::move(branch));

    if (ch.map_is_bijective(alpha)) {
        // Relabeling the copy restores the correlation deterministically.
        ComplexMatrix u(db, db);
        for (std::size_t i = 0; i < db; ++i) u(f[i], i) = 1.0;
        const ComplexMatrix u_full = embed_at_slot(u, tau.dims(), 2);
        trace.deterministic_path = true;
        trace.success_prob = 1.0;
        trace.final_state =
            symmetrized(tau.dims(), u_full * tau.mat() * u_full.adjoint());
        return trace;
    }

    // Ancilla round trip: |0> ancilla, controlled relabeling, then project
    // the ancilla onto the uniform vector.
    const DensityMatrix with_ancilla = tensor(tau, PureState::basis_state({db}, 0).density());
    const ComplexMatrix u_pair = relabeling_unitary(f, db);
    // The relabeling acts jointly on the copy and the ancilla (slots 2, 3).
    const ComplexMatrix u_full = kron(ComplexMatrix::identity(with_ancilla.dim() / (db * db)), u_pair);
    const DensityMatrix rotated =
        symmetrized(with_ancilla.dims(), u_full * with_ancilla.mat() * u_full.adjoint());

    std::vector<cplx> uniform(db, 1.0 / std::sqrt(static_cast<double>(db)));
    auto [prob, post] = project_subsystem(rotated, 3, uniform);
    trace.success_prob = prob;
    trace.final_state = std::move(post);
    return trace;
}

std::vector<ProtocolNode> run_protocol_tree(const DensityMatrix& rho,
                                            const std::vector<ProtocolStep>& steps) {
    require_bipartite(rho, "run_protocol_tree");
    if (steps.size() > kProtocolDepthCap)
        throw contract_violation("run_protocol_tree: protocol exceeds the depth cap of 8 steps");

    std::vector<ProtocolNode> nodes;
    struct Frontier {
        std::string path;
        DensityMatrix state;
        double probability;
    };
    std::vector<Frontier> frontier{{"", rho, 1.0}};

    for (std::size_t depth = 0; depth < steps.size(); ++depth) {
        const ProtocolStep& step = steps[depth];
        std::vector<Frontier> next;

        if (step.party == 'B') {
            const IncoherentChannel ch = validate_incoherent(step.kraus);
            for (const Frontier& fr : frontier) {
                for (std::size_t alpha = 0; alpha < ch.size(); ++alpha) {
                    SloccTrace t = simulate_slocc_step(fr.state, ch, alpha);
                    ProtocolNode node;
                    node.path = fr.path.empty() ? std::to_string(alpha)
                                                : fr.path + "/" + std::to_string(alpha);
                    node.depth = depth;
                    node.party = 'B';
                    node.outcome_index = alpha;
                    node.probability = fr.probability * t.p_alpha;
                    if (!t.aborted) {
                        const ComplexMatrix k = embed_at_slot(ch.kraus[alpha], fr.state.dims(), 1);
                        ComplexMatrix post = k * fr.state.mat() * k.adjoint();
                        post *= cplx(1.0 / t.p_alpha);
                        node.state = symmetrized(fr.state.dims(), std::move(post));
                        next.push_back({node.path, node.state, node.probability});
                    }
                    node.trace = std::move(t);
                    nodes.push_back(std::move(node));
                }
            }
        } else if (step.party == 'A') {
            const std::size_t da = rho.dims()[0];
            ComplexMatrix completeness(da, da);
            for (const ComplexMatrix& k : step.kraus) {
                if (k.rows() != da || k.cols() != da)
                    throw contract_violation("run_protocol_tree: A-step Kraus dimension mismatch");
                completeness += k.adjoint() * k;
            }
            if (max_abs_difference(completeness, ComplexMatrix::identity(da)) > 1e-10)
                throw contract_violation("run_protocol_tree: A-step Kraus set not complete");

            for (const Frontier& fr : frontier) {
                for (std::size_t beta = 0; beta < step.kraus.size(); ++beta) {
                    const ComplexMatrix k = embed_at_slot(step.kraus[beta], fr.state.dims(), 0);
                    ComplexMatrix post = k * fr.state.mat() * k.adjoint();
                    const double prob = std::max(post.trace().real(), 0.0);

                    ProtocolNode node;
                    node.path = fr.path.empty() ? std::to_string(beta)
                                                : fr.path + "/" + std::to_string(beta);
                    node.depth = depth;
                    node.party = 'A';
                    node.outcome_index = beta;
                    node.probability = fr.probability * prob;
                    node.trace.alpha = beta;
                    node.trace.p_alpha = prob;
                    node.trace.q_alpha = prob;
                    node.trace.deterministic_path = true;
                    if (prob <= kAbortCutoff) {
                        node.trace.aborted = true;
                        node.trace.success_prob = 0.0;
                        node.trace.final_state = lift_bipartite(fr.state, 1);
                    } else {
                        post *= cplx(1.0 / prob);
                        node.state = symmetrized(fr.state.dims(), std::move(post));
                        node.trace.success_prob = 1.0;
                        node.trace.final_state = lift_bipartite(node.state, 1);
                        next.push_back({node.path, node.state, node.probability});
                    }
                    nodes.push_back(std::move(node));
                }
            }
        } else {
            throw contract_violation("run_protocol_tree: party must be 'A' or 'B'");
        }
        frontier = std::move(next);
    }
    return nodes;
}

std::vector<SloccTrace> simulate_lqicc_round_trip(const DensityMatrix& rho,
                                                  const std::vector<ComplexMatrix>& alice_kraus,
                                                  const std::optional<IncoherentChannel>& bob_ch) {
    require_bipartite(rho, "simulate_lqicc_round_trip");
    const std::size_t da = rho.dims()[0];

    if (!alice_kraus.empty()) {
        ComplexMatrix completeness(da, da);
        for (const ComplexMatrix& k : alice_kraus) {
            if (k.rows() != da || k.cols() != da)
                throw contract_violation("simulate_lqicc_round_trip: Alice Kraus dimension mismatch");
            completeness += k.adjoint() * k;
        }
        if (max_abs_difference(completeness, ComplexMatrix::identity(da)) > 1e-10)
            throw contract_violation("simulate_lqicc_round_trip: Alice Kraus set not complete");
    }

    // Alice's round branches the bipartite state; the same measurement on the
    // lifted state succeeds with the same probabilities, so the lift commutes
    // with this round.
    struct Branch {
        DensityMatrix state;
        double probability;
        std::size_t index;
    };
    std::vector<Branch> branches;
    if (alice_kraus.empty()) {
        branches.push_back({rho, 1.0, 0});
    } else {
        for (std::size_t beta = 0; beta < alice_kraus.size(); ++beta) {
            const ComplexMatrix k = embed_at_slot(alice_kraus[beta], rho.dims(), 0);
            ComplexMatrix mapped = k * rho.mat() * k.adjoint();
            const double prob = std::max(mapped.trace().real(), 0.0);
            if (prob <= kAbortCutoff) continue;
            mapped *= cplx(1.0 / prob);
            branches.push_back({symmetrized(rho.dims(), std::move(mapped)), prob, beta});
        }
    }

    std::vector<SloccTrace> traces;
    for (const Branch& branch : branches) {
        if (!bob_ch.has_value()) {
            SloccTrace t;
            t.alpha = branch.index;
            t.p_alpha = branch.probability;
            t.q_alpha = branch.probability;
            t.success_prob = 1.0;
            t.deterministic_path = true;
            t.final_state = lift_bipartite(branch.state, 1);
            traces.push_back(std::move(t));
            continue;
        }
        for (std::size_t alpha = 0; alpha < bob_ch->size(); ++alpha) {
            SloccTrace t = simulate_slocc_step(branch.state, *bob_ch, alpha);
            t.p_alpha *= branch.probability;
            t.q_alpha *= branch.probability;
            traces.push_back(std::move(t));
        }
    }
    return traces;
}

} // namespace coherence
