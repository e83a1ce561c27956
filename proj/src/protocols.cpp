#include "coherence/protocols.hpp"

#include <cmath>
#include <numbers>

#include "coherence/eig.hpp"
#include "coherence/errors.hpp"
#include "coherence/linalg.hpp"
#include "coherence/maxcorr.hpp"
#include "coherence/measures.hpp"

namespace coherence {

namespace {

constexpr double kQiTol = 1e-10;

void require_bipartite(const DensityMatrix& rho, const char* who) {
    if (rho.subsystem_count() != 2)
        throw contract_violation(std::string(who) + ": state must be bipartite");
}

double offdiagonal_max(const ComplexMatrix& m) {
    double worst = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (r != c) worst = std::max(worst, std::abs(m(r, c)));
    return worst;
}

DensityMatrix clipped_state(std::vector<std::size_t> dims, ComplexMatrix m) {
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

/// Full measurement basis on A containing u as column 0 and u_perp as
/// column 1, padded with the untouched computational vectors.
ComplexMatrix two_level_basis(std::size_t da, std::size_t k, std::size_t l,
                              const std::array<cplx, 2>& u, const std::array<cplx, 2>& u_perp) {
    ComplexMatrix basis(da, da);
    basis(k, 0) = u[0];
    basis(l, 0) = u[1];
    basis(k, 1) = u_perp[0];
    basis(l, 1) = u_perp[1];
    std::size_t col = 2;
    for (std::size_t m = 0; m < da; ++m) {
        if (m == k || m == l) continue;
        basis(m, col++) = 1.0;
    }
    return basis;
}

} // namespace

bool is_qi_state(const DensityMatrix& rho, std::size_t b_slot) {
    require_bipartite(rho, "is_qi_state");
    if (b_slot >= 2) throw contract_violation("is_qi_state: b_slot out of range");
    const DensityMatrix dephased = dephase(rho, {b_slot});
    return max_abs_difference(dephased.mat(), rho.mat()) < kQiTol;
}

WitnessResult find_coherence_witness(const DensityMatrix& rho, std::size_t b_slot,
                                     std::size_t theta_points) {
    require_bipartite(rho, "find_coherence_witness");
    if (b_slot >= 2) throw contract_violation("find_coherence_witness: b_slot out of range");
    if (theta_points < 1) throw contract_violation("find_coherence_witness: need a nonempty grid");

    WitnessResult result;
    if (is_qi_state(rho, b_slot)) return result;

    const std::size_t a_slot = 1 - b_slot;
    const std::size_t da = rho.dims()[a_slot];
    const std::size_t db = rho.dims()[b_slot];
    // Blocks indexed by A's basis carry operators on B.
    const BlockDecomposition dec = extract_blocks(rho, a_slot);

    // Branch one: some outcome of the computational measurement already
    // leaves B coherent.
    for (std::size_t i = 0; i < da; ++i) {
        const ComplexMatrix& nii = dec.block(i, i);
        const double prob = nii.trace().real();
        if (prob < 1e-9 || offdiagonal_max(nii) < kQiTol) continue;
        ComplexMatrix post = nii;
        post *= cplx(1.0 / prob);
        MeasurementOutcome outcome{i, prob, clipped_state({db}, std::move(post))};
        result.found = true;
        result.alice_basis = ComplexMatrix::identity(da);
        result.coherence_bits = relative_entropy_of_coherence(outcome.post_state);
        result.outcome = std::move(outcome);
        return result;
    }

    // Branch two: every diagonal block is incoherent, so some off-diagonal
    // block must carry the coherence. Scan rotated two-level measurements.
    double best_score = 0.0;
    for (std::size_t k = 0; k + 1 < da; ++k) {
        for (std::size_t l = k + 1; l < da; ++l) {
            // Hermitian combinations of the off-diagonal block.
            ComplexMatrix real_comb = dec.block(k, l) + dec.block(l, k);
            ComplexMatrix imag_comb = dec.block(k, l) - dec.block(l, k);
            imag_comb *= cplx(0.0, 1.0);
            if (offdiagonal_max(real_comb) < 1e-12 && offdiagonal_max(imag_comb) < 1e-12)
                continue;

            for (int use_imag = 0; use_imag < 2; ++use_imag) {
                for (std::size_t jj = 1; jj <= theta_points; ++jj) {
                    const double theta = static_cast<double>(jj) * std::numbers::pi /
                                         (2.0 * static_cast<double>(theta_points + 1));
                    const double ct = std::cos(theta), st = std::sin(theta);
                    const cplx phase = use_imag ? cplx(0.0, 1.0) : cplx(1.0, 0.0);

                    ComplexMatrix unnorm = dec.block(k, k);
                    unnorm *= cplx(ct * ct);
                    ComplexMatrix ll_part = dec.block(l, l);
                    ll_part *= cplx(st * st);
                    unnorm += ll_part;
                    ComplexMatrix cross = use_imag ? imag_comb : real_comb;
                    cross *= cplx(ct * st);
                    unnorm += cross;

                    const double prob = unnorm.trace().real();
                    if (prob < 1e-12) continue;
                    unnorm *= cplx(1.0 / prob);
                    const DensityMatrix post = clipped_state({db}, std::move(unnorm));
                    const double bits = relative_entropy_of_coherence(post);
                    const double score = prob * bits;
                    if (score <= best_score) continue;

                    best_score = score;
                    result.found = true;
                    result.coherence_bits = bits;
                    result.alice_basis = two_level_basis(
                        da, k, l, {cplx(ct), phase * st}, {cplx(-st), phase * ct});
                    result.outcome = MeasurementOutcome{0, prob, post};
                }
            }
        }
    }
    return result;
}

std::pair<PureState, PureState> mub_for_two_states(const PureState& psi0, const PureState& psi1) {
    if (psi0.dims() != psi1.dims())
        throw contract_violation("mub_for_two_states: states live on different spaces");
    const std::size_t d = psi0.dim();
    if (d < 2) throw contract_violation("mub_for_two_states: need dimension at least 2");

    // Orthonormal frame of span{psi0, psi1}; extended when the span is a
    // line. The 1e-5 cutoff balances frame orthogonality against the
    // component of psi1 escaping the frame, keeping both below 1e-10.
    const std::vector<cplx>& b0 = psi0.vec();
    std::vector<cplx> b1(d);
    {
        const cplx overlap = inner_product(b0, psi1.vec());
        for (std::size_t i = 0; i < d; ++i) b1[i] = psi1.vec()[i] - overlap * b0[i];
        double n = norm(b1);
        if (n < 1e-5) {
            // Degenerate span: extend with the first basis vector that has a
            // sizeable component orthogonal to b0.
            for (std::size_t j = 0; j < d; ++j) {
                for (std::size_t i = 0; i < d; ++i) b1[i] = (i == j ? 1.0 : 0.0);
                const cplx c = inner_product(b0, b1);
                for (std::size_t i = 0; i < d; ++i) b1[i] -= c * b0[i];
                n = norm(b1);
                if (n * n > 0.5) break;
            }
        }
        for (cplx& z : b1) z /= n;
    }

    // Coordinates of psi1 in the frame; psi0 is (1, 0) by construction.
    const cplx c0 = inner_product(b0, psi1.vec());
    const cplx c1 = inner_product(b1, psi1.vec());

    // Bloch vector of psi1 in the frame; psi0 sits at the north pole. The
    // unbiased pair lives on the equatorial axis orthogonal to both, i.e.
    // along z-cross-n1, with a fixed fallback when the cross product dies.
    const double nx = 2.0 * (std::conj(c0) * c1).real();
    const double ny = 2.0 * (std::conj(c0) * c1).imag();
    double mx = -ny, my = nx;
    const double mlen = std::hypot(mx, my);
    if (mlen < 1e-11) {
        // Equatorial overlap this small cannot bias any equatorial choice
        // beyond 1e-11; fix the frame's x axis.
        mx = 1.0;
        my = 0.0;
    } else {
        mx /= mlen;
        my /= mlen;
    }
    const cplx equatorial_phase(mx, my);

    const double s = 1.0 / std::sqrt(2.0);
    std::vector<cplx> plus(d), minus(d);
    for (std::size_t i = 0; i < d; ++i) {
        plus[i] = s * (b0[i] + equatorial_phase * b1[i]);
        minus[i] = s * (b0[i] - equatorial_phase * b1[i]);
    }
    return {PureState::trusted(psi0.dims(), std::move(plus)),
            PureState::trusted(psi0.dims(), std::move(minus))};
}

AssistanceRun qubit_assistance_protocol(const PureState& psi, std::size_t b_slot) {
    if (psi.dims().size() != 2)
        throw contract_violation("qubit_assistance_protocol: state must be bipartite");
    if (b_slot >= 2) throw contract_violation("qubit_assistance_protocol: b_slot out of range");
    if (psi.dims()[b_slot] != 2)
        throw contract_violation("qubit_assistance_protocol: target subsystem is not a qubit");

    const PureState ordered = b_slot == 1 ? psi : permute_subsystems(psi, {1, 0});
    const std::size_t da = ordered.dims()[0];
    if (da < 2)
        throw contract_violation("qubit_assistance_protocol: assisting side must have dimension >= 2");

    // Conditional states of the assisting side given the target's basis value.
    std::array<double, 2> weight{0.0, 0.0};
    std::array<std::vector<cplx>, 2> cond;
    for (std::size_t k = 0; k < 2; ++k) {
        cond[k].resize(da);
        for (std::size_t a = 0; a < da; ++a) {
            cond[k][a] = ordered.vec()[a * 2 + k];
            weight[k] += std::norm(cond[k][a]);
        }
    }
    for (std::size_t k = 0; k < 2; ++k) {
        if (weight[k] > 1e-14) {
            const double inv = 1.0 / std::sqrt(weight[k]);
            for (cplx& z : cond[k]) z *= inv;
        } else {
            cond[k] = cond[1 - k]; // target marginal is pure; any frame works
        }
    }

    const auto [eta_plus, eta_minus] =
        mub_for_two_states(PureState::trusted({da}, cond[0]), PureState::trusted({da}, cond[1]));

    const DensityMatrix full = ordered.density();
    auto [p_plus, post_plus] = project_subsystem(full, 0, eta_plus.vec());
    auto [p_minus, post_minus] = project_subsystem(full, 0, eta_minus.vec());

    AssistanceRun run;
    run.outcomes[0] = {0, p_plus, std::move(post_plus)};
    run.outcomes[1] = {1, p_minus, std::move(post_minus)};
    run.achieved_bits = regularized_coa(partial_trace(full, {1}));
    return run;
}

NonadditivityCertificate nonadditivity_certificate(const RoofConfig& config) {
    const double s = 1.0 / std::sqrt(2.0);
    std::vector<cplx> amp(8, 0.0);
    amp[0 * 4 + 0] = 0.5;
    amp[1 * 4 + 1] = 0.5;
    amp[0 * 4 + 2] = 0.5 * s;
    amp[1 * 4 + 2] = 0.5 * s;
    amp[0 * 4 + 3] = 0.25;
    amp[1 * 4 + 3] = cplx(0.25, 0.25 * std::sqrt(2.0));

    NonadditivityCertificate cert;
    cert.state = PureState::make({2, 4}, std::move(amp));

    // The four conditional states of the assisting qubit given the target's
    // basis value; a POVM element M leaving the target maximally coherent
    // must satisfy <a_l|M|a_k> = p for every ordered pair, p > 0.
    const std::array<std::array<cplx, 2>, 4> a_states{{{1.0, 0.0},
                                                       {0.0, 1.0},
                                                       {s, s},
                                                       {0.5, cplx(0.5, s)}}};

    // Homogeneous real system in (M00, M11, Re M01, Im M01) after eliminating
    // p against the (0,0) overlap: every pair overlap minus the reference.
    std::vector<std::array<double, 4>> rows;
    auto overlap_coeffs = [&](std::size_t k, std::size_t l) {
        // <a_l|M|a_k> as complex-linear coefficients of the four unknowns.
        const std::array<cplx, 2>& ak = a_states[k];
        const std::array<cplx, 2>& al = a_states[l];
        return std::array<cplx, 4>{
            std::conj(al[0]) * ak[0],                           // M00
            std::conj(al[1]) * ak[1],                           // M11
            std::conj(al[0]) * ak[1] + std::conj(al[1]) * ak[0], // Re M01
            cplx(0.0, 1.0) * (std::conj(al[0]) * ak[1] - std::conj(al[1]) * ak[0]) // Im M01
        };
    };
    const std::array<cplx, 4> ref = overlap_coeffs(0, 0);
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t l = 0; l < 4; ++l) {
            if (k == 0 && l == 0) continue;
            const std::array<cplx, 4> co = overlap_coeffs(k, l);
            std::array<double, 4> re{}, im{};
            for (std::size_t u = 0; u < 4; ++u) {
                re[u] = (co[u] - ref[u]).real();
                im[u] = (co[u] - ref[u]).imag();
            }
            rows.push_back(re);
            rows.push_back(im);
        }

    // Trivial null space of the Gram matrix means M = 0 is the only solution
    // (and M = 0 forces p = 0, so no valid POVM element exists).
    ComplexMatrix gram(4, 4);
    for (const auto& row : rows)
        for (std::size_t u = 0; u < 4; ++u)
            for (std::size_t v = 0; v < 4; ++v) gram(u, v) += row[u] * row[v];
    const Spectrum gs = hermitian_eig(gram);
    cert.forced_zero = gs.eigenvalues.back() > 1e-12;

    const DensityMatrix rho_b = partial_trace(cert.state.density(), {1});
    cert.ca_report = coherence_of_assistance(rho_b, config);
    if (!(cert.ca_report.value < 2.0 - 1e-3))
        throw contract_violation(
            "nonadditivity_certificate: optimizer failed to stay below the regularized value");
    return cert;
}

LocalizationRun localize_coherence(const PureState& psi, std::size_t b_slot) {
    if (psi.dims().size() < 2)
        throw contract_violation("localize_coherence: need at least two subsystems");
    if (b_slot >= psi.dims().size())
        throw contract_violation("localize_coherence: b_slot out of range");
    if (psi.dims()[b_slot] != 2)
        throw contract_violation("localize_coherence: target subsystem is not a qubit");

    const PureState grouped = group_to_bipartite(psi, b_slot);
    AssistanceRun run = qubit_assistance_protocol(grouped, 1);

    LocalizationRun out;
    out.rate_bits = run.achieved_bits;
    out.outcomes = std::move(run.outcomes);
    return out;
}

} // namespace coherence
