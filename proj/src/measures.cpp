#include "coherence/measures.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "coherence/eig.hpp"
#include "coherence/errors.hpp"
#include "coherence/linalg.hpp"

namespace coherence {

namespace {

constexpr double kClipFloor = -1e-10;

double clip_probability(double p, const char* who) {
    if (p < kClipFloor) throw contract_violation(std::string(who) + ": probability below the -1e-10 floor");
    return p < 0.0 ? 0.0 : p;
}

// Tiny negatives from cancellation are snapped to zero; anything sizeable is
// a genuine bug and must surface.
double snap_nonnegative(double x) { return (x < 0.0 && x > -1e-9) ? 0.0 : x; }

std::vector<double> diagonal_probs(const DensityMatrix& rho, const char* who) {
    std::vector<double> p(rho.dim());
    for (std::size_t i = 0; i < rho.dim(); ++i)
        p[i] = clip_probability(rho.mat()(i, i).real(), who);
    return p;
}

} // namespace

double shannon_entropy(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        const double q = clip_probability(p, "shannon_entropy");
        if (q > 0.0) h -= q * std::log2(q);
    }
    // Weights summing to 1 + O(eps) can push a pure spectrum a hair negative.
    return snap_nonnegative(h);
}

double von_neumann_entropy(const DensityMatrix& rho) {
    const Spectrum spec = hermitian_eig(rho.mat());
    return shannon_entropy(spec.eigenvalues);
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw contract_violation("binary_entropy: argument outside [0, 1]");
    double h = 0.0;
    if (x > 0.0) h -= x * std::log2(x);
    if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
    return h;
}

RelEntropyResult relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dims() != sigma.dims())
        throw contract_violation("relative_entropy: dimension mismatch");

    const Spectrum sig = hermitian_eig(sigma.mat());
    const std::size_t d = rho.dim();

    double cross = 0.0; // Tr(rho log2 sigma)
    for (std::size_t j = 0; j < d; ++j) {
        // Weight of rho along sigma's j-th eigenvector.
        cplx wr = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
            cplx row = 0.0;
            for (std::size_t c = 0; c < d; ++c) row += rho.mat()(r, c) * sig.eigenvectors(c, j);
            wr += std::conj(sig.eigenvectors(r, j)) * row;
        }
        const double pj = clip_probability(wr.real(), "relative_entropy");
        const double mu = clip_probability(sig.eigenvalues[j], "relative_entropy");
        if (mu < kSupportCutoff) {
            if (pj > kSupportCutoff) return {0.0, true};
            continue;
        }
        cross += pj * std::log2(mu);
    }
    return {snap_nonnegative(-cross - von_neumann_entropy(rho)), false};
}

double relative_entropy_of_coherence(const DensityMatrix& rho) {
    const double dephased = shannon_entropy(diagonal_probs(rho, "relative_entropy_of_coherence"));
    return snap_nonnegative(dephased - von_neumann_entropy(rho));
}

double qi_relative_entropy(const DensityMatrix& rho, std::size_t b_slot) {
    if (rho.subsystem_count() != 2)
        throw contract_violation("qi_relative_entropy: state must be bipartite");
    if (b_slot >= 2) throw contract_violation("qi_relative_entropy: b_slot out of range");
    const DensityMatrix dephased = dephase(rho, {b_slot});
    return snap_nonnegative(von_neumann_entropy(dephased) - von_neumann_entropy(rho));
}

double regularized_coa(const DensityMatrix& rho) {
    return shannon_entropy(diagonal_probs(rho, "regularized_coa"));
}

double regularized_eoa(const DensityMatrix& rho) {
    if (rho.subsystem_count() != 2)
        throw contract_violation("regularized_eoa: state must be bipartite");
    const double first = von_neumann_entropy(partial_trace(rho, {0}));
    const double second = von_neumann_entropy(partial_trace(rho, {1}));
    return std::min(first, second);
}

double assistance_gain(const DensityMatrix& rho_b) { return von_neumann_entropy(rho_b); }

ContinuityCheck continuity_gap_check(const DensityMatrix& rho, const DensityMatrix& sigma,
                                     std::size_t b_slot) {
    if (rho.dims() != sigma.dims())
        throw contract_violation("continuity_gap_check: dimension mismatch");

    ContinuityCheck out;
    out.trace_dist = trace_distance(rho, sigma);
    out.in_regime = out.trace_dist <= 0.5 + 1e-12;
    out.lhs = std::abs(qi_relative_entropy(rho, b_slot) - qi_relative_entropy(sigma, b_slot));
    const double t = std::clamp(out.trace_dist, 0.0, 1.0);
    out.rhs = 2.0 * t * std::log2(static_cast<double>(rho.dim())) + 2.0 * binary_entropy(t);
    out.holds = out.lhs <= out.rhs + 1e-9;
    return out;
}

} // namespace coherence
