#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "coherence/eig.hpp"
#include "coherence/errors.hpp"
#include "coherence/linalg.hpp"
#include "coherence/measures.hpp"
#include "coherence/roof.hpp"
#include "coherence/rng.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace coherence;
using namespace helpers;

namespace {

double dephased_entropy_of(std::span<const cplx> psi) {
    double h = 0.0;
    for (const cplx& z : psi) {
        const double p = std::norm(z);
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

/// Exhaustive scan over all size-2 decompositions of a rank-2 state, both
/// parameters on a fine grid. Independent of the sweep optimizer it checks.
double grid_roof_rank2(const DensityMatrix& rho, bool maximize, double theta_step,
                       double phi_step) {
    const Spectrum spec = hermitian_eig(rho.mat());
    const std::size_t d = rho.dim();
    REQUIRE(spec.eigenvalues.size() >= 2);
    REQUIRE((spec.eigenvalues.size() < 3 || spec.eigenvalues[2] < 1e-12));

    std::vector<cplx> p0(d), p1(d);
    for (std::size_t i = 0; i < d; ++i) {
        p0[i] = std::sqrt(spec.eigenvalues[0]) * spec.eigenvectors(i, 0);
        p1[i] = std::sqrt(spec.eigenvalues[1]) * spec.eigenvectors(i, 1);
    }

    auto member = [&](std::vector<cplx>& x) {
        double q = 0.0;
        for (const cplx& z : x) q += std::norm(z);
        if (q < 1e-15) return 0.0;
        double h = 0.0;
        for (const cplx& z : x) {
            const double p = std::norm(z) / q;
            if (p > 0.0) h -= p * std::log2(p);
        }
        return q * h;
    };

    double best = maximize ? -1.0 : 1e9;
    std::vector<cplx> u(d), w(d);
    for (double theta = 0.0; theta <= std::numbers::pi / 2 + 1e-12; theta += theta_step) {
        const double c = std::cos(theta), s = std::sin(theta);
        for (double phi = 0.0; phi < 2.0 * std::numbers::pi; phi += phi_step) {
            const cplx e{std::cos(phi), std::sin(phi)};
            for (std::size_t i = 0; i < d; ++i) {
                u[i] = c * p0[i] + s * e * p1[i];
                w[i] = -s * std::conj(e) * p0[i] + c * p1[i];
            }
            const double val = member(u) + member(w);
            best = maximize ? std::max(best, val) : std::min(best, val);
        }
    }
    return best;
}

DensityMatrix maximally_correlated_of(const DensityMatrix& rho) {
    const std::size_t d = rho.dim();
    ComplexMatrix mc(d * d, d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) mc(i * d + i, j * d + j) = rho.mat()(i, j);
    return DensityMatrix::trusted({d, d}, std::move(mc));
}

} // namespace

TEST_CASE("roof_optimize: pure states have a unique single-member decomposition") {
    SplitMix64 rng(31);
    const PureState psi = random_pure({3}, rng);
    const RoofResult res = coherence_of_assistance(psi.density());
    CHECK(res.ensemble.members.size() == 1);
    CHECK(res.ensemble.members[0].probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.value == doctest::Approx(dephased_entropy_of(psi.vec())).epsilon(1e-10));
    CHECK(res.converged);
}

TEST_CASE("roof_optimize: qubit coherence of assistance reaches the dephased entropy") {
    SplitMix64 rng(32);
    RoofConfig cfg;
    cfg.restarts = 8;
    for (int rep = 0; rep < 20; ++rep) {
        const DensityMatrix rho = random_density({2}, 2, rng);
        const RoofResult res = coherence_of_assistance(rho, cfg);
        const double target = regularized_coa(rho);
        CHECK(std::abs(res.value - target) < 1e-6);
        CHECK(res.value <= target + 1e-9);
    }
}

TEST_CASE("roof_optimize: rank-2 qutrit maximum matches the exhaustive grid") {
    SplitMix64 rng(33);
    const DensityMatrix rho = random_density({3}, 2, rng);
    const double grid = grid_roof_rank2(rho, true, 1e-3, 1e-3);
    const RoofResult res = coherence_of_assistance(rho);
    CHECK(std::abs(res.value - grid) < 1e-4);
}

TEST_CASE("roof_optimize: ensemble certificate invariants") {
    SplitMix64 rng(34);
    const DensityMatrix rho = random_density({3}, 3, rng);
    const RoofResult res = coherence_of_assistance(rho);

    double total_prob = 0.0, recomputed = 0.0;
    for (const EnsembleMember& mem : res.ensemble.members) {
        total_prob += mem.probability;
        recomputed += mem.probability * dephased_entropy_of(mem.state.vec());
    }
    CHECK(std::abs(total_prob - 1.0) < 1e-10);
    CHECK(std::abs(recomputed - res.value) < 1e-9);
    CHECK(ensemble_defect(res.ensemble, rho) < 1e-8);

    // Never below the trivial eigendecomposition ensemble.
    const Spectrum spec = hermitian_eig(rho.mat());
    double eigen_value = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        std::vector<cplx> v(3);
        for (std::size_t i = 0; i < 3; ++i) v[i] = spec.eigenvectors(i, k);
        eigen_value += spec.eigenvalues[k] * dephased_entropy_of(v);
    }
    CHECK(res.value >= eigen_value - 1e-10);
    CHECK(res.best_history.size() == res.restarts_used);
}

TEST_CASE("roof_optimize: adding restarts never hurts and seeds reproduce") {
    SplitMix64 rng(35);
    const DensityMatrix rho = random_density({3}, 3, rng);

    RoofConfig c4;
    c4.restarts = 4;
    RoofConfig c8;
    c8.restarts = 8;
    const RoofResult r4 = coherence_of_assistance(rho, c4);
    const RoofResult r8 = coherence_of_assistance(rho, c8);
    CHECK(r8.value >= r4.value - 1e-12);

    const RoofResult again = coherence_of_assistance(rho, c4);
    CHECK(again.value == r4.value);
    REQUIRE(again.ensemble.members.size() == r4.ensemble.members.size());
    for (std::size_t i = 0; i < r4.ensemble.members.size(); ++i)
        CHECK(again.ensemble.members[i].probability == r4.ensemble.members[i].probability);

    RoofConfig tiny;
    tiny.restarts = 0;
    CHECK_THROWS_AS(coherence_of_assistance(rho, tiny), contract_violation);
    RoofConfig small_cap;
    small_cap.ensemble_cap = 2;
    CHECK_THROWS_AS(coherence_of_assistance(rho, small_cap), contract_violation);
}

TEST_CASE("roof_optimize: sweep starvation is reported as non-convergence") {
    SplitMix64 rng(41);
    const DensityMatrix rho = random_density({4}, 4, rng);
    RoofConfig starved;
    starved.restarts = 2;
    starved.max_sweeps = 1;
    starved.tol = 1e-15;
    const RoofResult res = coherence_of_assistance(rho, starved);
    CHECK(!res.converged);
}

TEST_CASE("IsometryParam: validation and Haar construction") {
    SplitMix64 rng(42);
    CHECK_NOTHROW(IsometryParam::make(haar_isometry(5, 3, rng)));
    ComplexMatrix skew(3, 2);
    skew(0, 0) = 1.0;
    skew(0, 1) = 1.0; // columns not orthogonal
    skew(1, 1) = 0.2;
    CHECK_THROWS_AS(IsometryParam::make(skew), contract_violation);
    CHECK_THROWS_AS(IsometryParam::make(ComplexMatrix(2, 3)), contract_violation);
}

TEST_CASE("coherence_of_assistance: symmetric mixed state and regularized dominance") {
    RoofConfig cfg;
    cfg.restarts = 8;
    const RoofResult mm = coherence_of_assistance(maximally_mixed(2), cfg);
    CHECK(std::abs(mm.value - 1.0) < 1e-9);

    SplitMix64 rng(36);
    for (const auto& dims : {std::vector<std::size_t>{2}, {3}, {4}}) {
        const DensityMatrix rho = random_density(dims, 2, rng);
        const RoofResult res = coherence_of_assistance(rho, cfg);
        CHECK(res.value <= regularized_coa(rho) + 1e-6);
    }
}

TEST_CASE("coherence_of_formation: pure, diagonal and oracle-checked qubit values") {
    SplitMix64 rng(37);
    const PureState psi = random_pure({3}, rng);
    const RoofResult pure_res = coherence_of_formation(psi.density());
    CHECK(std::abs(pure_res.value - relative_entropy_of_coherence(psi.density())) < 1e-9);

    const RoofResult diag_res = coherence_of_formation(diagonal_state({0.2, 0.5, 0.3}));
    CHECK(std::abs(diag_res.value) < 1e-12);

    // Real-entried qubit fixture against the exhaustive two-member grid.
    ComplexMatrix m(2, 2);
    m(0, 0) = 0.7;
    m(1, 1) = 0.3;
    m(0, 1) = 0.25;
    m(1, 0) = 0.25;
    const DensityMatrix qubit = DensityMatrix::make({2}, std::move(m));
    const double grid = grid_roof_rank2(qubit, false, 1e-3, 1e-3);
    const RoofResult qres = coherence_of_formation(qubit);
    CHECK(std::abs(qres.value - grid) < 1e-4);

    SplitMix64 rng2(38);
    for (int rep = 0; rep < 5; ++rep) {
        const DensityMatrix rho = random_density({3}, 2, rng2);
        const RoofResult res = coherence_of_formation(rho);
        const double cr = relative_entropy_of_coherence(rho);
        CHECK(cr <= res.value + 1e-6);
    }
}

TEST_CASE("entanglement_of_assistance: pure value, Bell-mixture optimum") {
    SplitMix64 rng(39);
    const PureState psi = random_pure({2, 3}, rng);
    const RoofResult pure_res = entanglement_of_assistance(psi.density());
    const double ent = von_neumann_entropy(partial_trace(psi.density(), {1}));
    CHECK(std::abs(pure_res.value - ent) < 1e-9);

    // The four Bell states decompose I/4 with one bit of entanglement each,
    // so the roof reaches 1; the regularized value caps it at 1.
    RoofConfig cfg;
    cfg.restarts = 8;
    const DensityMatrix mixed = DensityMatrix::make({2, 2}, maximally_mixed(4).mat());
    const RoofResult res = entanglement_of_assistance(mixed, cfg);
    CHECK(res.value <= regularized_eoa(mixed) + 1e-9);
    CHECK(std::abs(res.value - 1.0) < 1e-6);
}

TEST_CASE("maximally correlated correspondence: qubit assistance values agree") {
    SplitMix64 rng(40);
    RoofConfig cfg;
    cfg.restarts = 8;
    for (int rep = 0; rep < 5; ++rep) {
        const DensityMatrix rho = random_density({2}, 2, rng);
        const RoofResult ca = coherence_of_assistance(rho, cfg);
        const RoofResult ea = entanglement_of_assistance(maximally_correlated_of(rho), cfg);
        CHECK(std::abs(ca.value - ea.value) < 2e-6);
    }
}
