#include <cmath>
#include <vector>

#include "doctest.h"

#include "coherence/channels.hpp"
#include "coherence/errors.hpp"
#include "coherence/linalg.hpp"
#include "coherence/rng.hpp"
#include "test_helpers.hpp"

using namespace coherence;
using namespace helpers;

namespace {

std::vector<ComplexMatrix> dephasing_kraus(std::size_t d) {
    std::vector<ComplexMatrix> ks;
    for (std::size_t i = 0; i < d; ++i) {
        ComplexMatrix k(d, d);
        k(i, i) = 1.0;
        ks.push_back(std::move(k));
    }
    return ks;
}

} // namespace

TEST_CASE("validate_incoherent: projectors, permutations, rejections") {
    const IncoherentChannel deph = validate_incoherent(dephasing_kraus(3));
    CHECK(deph.size() == 3);
    for (std::size_t a = 0; a < 3; ++a) {
        CHECK(deph.maps[a][a] == a);
        CHECK(std::abs(deph.coeffs[a][a] - cplx(1.0)) < 1e-14);
    }

    // Cyclic relabeling unitary as a single Kraus operator.
    ComplexMatrix cyc(3, 3);
    cyc(1, 0) = 1.0;
    cyc(2, 1) = 1.0;
    cyc(0, 2) = 1.0;
    const IncoherentChannel perm = validate_incoherent({cyc});
    CHECK(perm.maps[0] == std::vector<std::size_t>{1, 2, 0});
    CHECK(perm.map_is_bijective(0));

    // Hadamard has two nonzero entries per column.
    const double s = 1.0 / std::sqrt(2.0);
    ComplexMatrix had(2, 2);
    had(0, 0) = s;
    had(0, 1) = s;
    had(1, 0) = s;
    had(1, 1) = -s;
    CHECK_THROWS_WITH_AS(validate_incoherent({had}),
                         doctest::Contains("coherent Kraus operator"), contract_violation);

    // Incomplete set.
    ComplexMatrix half(2, 2);
    half(0, 0) = s;
    half(1, 1) = s;
    CHECK_THROWS_WITH_AS(validate_incoherent({half}), doctest::Contains("not trace preserving"),
                         contract_violation);
}

TEST_CASE("validate_incoherent: acceptance is exactly the one-nonzero-per-column family") {
    SplitMix64 rng(51);
    for (int rep = 0; rep < 20; ++rep) {
        const IncoherentChannel ch = random_incoherent_channel(3, 1 + rep % 3, rng);
        CHECK_NOTHROW(validate_incoherent(ch.kraus));

        // Un-zero one extra entry in some occupied column: must be rejected.
        std::vector<ComplexMatrix> broken = ch.kraus;
        bool planted = false;
        for (std::size_t a = 0; a < broken.size() && !planted; ++a)
            for (std::size_t col = 0; col < 3 && !planted; ++col)
                for (std::size_t row = 0; row < 3; ++row)
                    if (std::abs(broken[a](row, col)) > 1e-12) {
                        broken[a]((row + 1) % 3, col) = 0.3;
                        planted = true;
                        break;
                    }
        REQUIRE(planted);
        CHECK_THROWS_AS(validate_incoherent(broken), contract_violation);
    }
}

TEST_CASE("apply_channel: identity, dephasing, permutation") {
    SplitMix64 rng(52);
    const DensityMatrix rho = random_density({2}, 2, rng);

    const IncoherentChannel id = validate_incoherent({ComplexMatrix::identity(2)});
    const auto id_out = apply_channel(rho, id, 0);
    REQUIRE(id_out.size() == 1);
    CHECK(id_out[0].probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_abs_difference(id_out[0].post_state.mat(), rho.mat()) < 1e-12);

    const auto deph_out = apply_channel(ket_plus().density(), validate_incoherent(dephasing_kraus(2)), 0);
    REQUIRE(deph_out.size() == 2);
    CHECK(deph_out[0].probability == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(deph_out[1].probability == doctest::Approx(0.5).epsilon(1e-12));

    ComplexMatrix swap01(2, 2);
    swap01(1, 0) = 1.0;
    swap01(0, 1) = 1.0;
    const DensityMatrix diag = diagonal_state({0.3, 0.7});
    const auto perm_out = apply_channel(diag, validate_incoherent({swap01}), 0);
    REQUIRE(perm_out.size() == 1);
    CHECK(perm_out[0].probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(perm_out[0].post_state.mat()(0, 0).real() == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(perm_out[0].post_state.mat()(1, 1).real() == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("apply_channel: probabilities over outcomes always sum to one") {
    SplitMix64 rng(53);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t d = 2 + rep % 2;
        const DensityMatrix rho = random_density({d, 2}, d, rng);
        const IncoherentChannel ch = random_incoherent_channel(d, 2, rng);
        double total = 0.0;
        for (const MeasurementOutcome& out : apply_channel(rho, ch, 0)) total += out.probability;
        CHECK(std::abs(total - 1.0) < 1e-10);
    }
}

TEST_CASE("measure_von_neumann: marginal statistics on the measured slot") {
    SplitMix64 rng(54);
    const DensityMatrix rho = random_density({2, 3}, 3, rng);
    SplitMix64 basis_rng(55);
    const ComplexMatrix basis = haar_unitary(2, basis_rng);
    const auto outs = measure_von_neumann(rho, basis, 0);
    REQUIRE(outs.size() == 2);
    double total = 0.0;
    for (const auto& o : outs) {
        total += o.probability;
        CHECK(o.post_state.dims() == std::vector<std::size_t>{3});
    }
    CHECK(std::abs(total - 1.0) < 1e-10);

    CHECK_THROWS_AS(measure_von_neumann(rho, ComplexMatrix::identity(3), 0), contract_violation);
}
