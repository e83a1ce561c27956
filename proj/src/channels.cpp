#include "coherence/channels.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "coherence/errors.hpp"
#include "coherence/linalg.hpp"

namespace coherence {

namespace {

constexpr double kEntryCutoff = 1e-12;
constexpr double kCompletenessTol = 1e-10;

DensityMatrix normalized_post(ComplexMatrix m, const std::vector<std::size_t>& dims, double prob) {
    m *= cplx(1.0 / prob);
    // Symmetrize away conjugation rounding before handing the state on.
    for (std::size_t r = 0; r < m.rows(); ++r) {
        m(r, r) = cplx(m(r, r).real(), 0.0);
        for (std::size_t c = r + 1; c < m.cols(); ++c) {
            const cplx avg = 0.5 * (m(r, c) + std::conj(m(c, r)));
            m(r, c) = avg;
            m(c, r) = std::conj(avg);
        }
    }
    return DensityMatrix::trusted(dims, std::move(m));
}

} // namespace

bool IncoherentChannel::map_is_bijective(std::size_t alpha) const {
    const std::vector<std::size_t>& f = maps.at(alpha);
    std::vector<bool> hit(f.size(), false);
    for (std::size_t target : f) {
        if (hit[target]) return false;
        hit[target] = true;
    }
    return true;
}

IncoherentChannel validate_incoherent(std::vector<ComplexMatrix> kraus) {
    if (kraus.empty()) throw contract_violation("incoherent channel: no Kraus operators");
    const std::size_t d = kraus.front().rows();
    for (const ComplexMatrix& k : kraus) {
        if (k.rows() != k.cols() || k.rows() != d)
            throw contract_violation("incoherent channel: Kraus operators must be square with equal dims");
        if (!k.all_finite())
            throw contract_violation("incoherent channel: non-finite Kraus entries");
    }

    IncoherentChannel ch;
    for (std::size_t alpha = 0; alpha < kraus.size(); ++alpha) {
        std::vector<cplx> c(d, 0.0);
        std::vector<std::size_t> f(d);
        for (std::size_t col = 0; col < d; ++col) {
            f[col] = col;
            bool seen = false;
            for (std::size_t row = 0; row < d; ++row) {
                if (std::abs(kraus[alpha](row, col)) <= kEntryCutoff) continue;
                if (seen) {
                    std::ostringstream os;
                    os << "coherent Kraus operator: operator " << alpha << " column " << col
                       << " has more than one nonzero entry";
                    throw contract_violation(os.str());
                }
                seen = true;
                f[col] = row;
                c[col] = kraus[alpha](row, col);
            }
        }
        ch.coeffs.push_back(std::move(c));
        ch.maps.push_back(std::move(f));
    }

    ComplexMatrix completeness(d, d);
    for (const ComplexMatrix& k : kraus) completeness += k.adjoint() * k;
    if (max_abs_difference(completeness, ComplexMatrix::identity(d)) > kCompletenessTol)
        throw contract_violation("incoherent channel: not trace preserving");

    ch.kraus = std::move(kraus);
    return ch;
}

ComplexMatrix embed_at_slot(const ComplexMatrix& op, const std::vector<std::size_t>& dims,
                            std::size_t slot) {
    if (slot >= dims.size()) throw contract_violation("embed_at_slot: slot out of range");
    if (op.rows() != dims[slot] || op.cols() != dims[slot])
        throw contract_violation("embed_at_slot: operator does not match subsystem dimension");
    std::size_t pre = 1, post = 1;
    for (std::size_t s = 0; s < slot; ++s) pre *= dims[s];
    for (std::size_t s = slot + 1; s < dims.size(); ++s) post *= dims[s];
    return kron(kron(ComplexMatrix::identity(pre), op), ComplexMatrix::identity(post));
}

std::vector<MeasurementOutcome> apply_channel(const DensityMatrix& rho,
                                              const IncoherentChannel& ch, std::size_t slot) {
    if (slot >= rho.subsystem_count()) throw contract_violation("apply_channel: slot out of range");
    if (ch.dim() != rho.dims()[slot])
        throw contract_violation("apply_channel: channel dimension does not match subsystem");

    std::vector<MeasurementOutcome> outcomes;
    for (std::size_t alpha = 0; alpha < ch.size(); ++alpha) {
        const ComplexMatrix k = embed_at_slot(ch.kraus[alpha], rho.dims(), slot);
        ComplexMatrix mapped = k * rho.mat() * k.adjoint();
        const double prob = std::max(mapped.trace().real(), 0.0);
        MeasurementOutcome out;
        out.outcome_index = alpha;
        out.probability = prob;
        if (prob > kEntryCutoff) out.post_state = normalized_post(std::move(mapped), rho.dims(), prob);
        outcomes.push_back(std::move(out));
    }
    return outcomes;
}

IncoherentChannel random_incoherent_channel(std::size_t dim, std::size_t components,
                                            SplitMix64& rng) {
    if (dim < 1 || components < 1)
        throw contract_violation("random_incoherent_channel: need dim >= 1 and components >= 1");

    // Component weights on the simplex.
    std::vector<double> weight(components);
    double total = 0.0;
    for (double& w : weight) {
        w = 0.1 + rng.next_double();
        total += w;
    }
    for (double& w : weight) w /= total;

    std::vector<ComplexMatrix> kraus;
    for (std::size_t comp = 0; comp < components; ++comp) {
        std::vector<std::size_t> map(dim);
        for (std::size_t& t : map) t = rng.next_u64() % dim;
        // Orthonormal coefficient columns keep the cross terms of the
        // completeness sum exactly zero even when the map merges levels.
        const ComplexMatrix u = haar_unitary(dim, rng);
        const double scale = std::sqrt(weight[comp]);
        for (std::size_t alpha = 0; alpha < dim; ++alpha) {
            ComplexMatrix k(dim, dim);
            for (std::size_t i = 0; i < dim; ++i) k(map[i], i) = scale * u(alpha, i);
            kraus.push_back(std::move(k));
        }
    }
    return validate_incoherent(std::move(kraus));
}

std::vector<MeasurementOutcome> measure_von_neumann(const DensityMatrix& rho,
                                                    const ComplexMatrix& basis, std::size_t slot) {
    if (slot >= rho.subsystem_count())
        throw contract_violation("measure_von_neumann: slot out of range");
    const std::size_t ds = rho.dims()[slot];
    if (basis.rows() != ds || basis.cols() != ds)
        throw contract_violation("measure_von_neumann: basis does not match subsystem dimension");
    if (basis.unitarity_defect() > 1e-8)
        throw contract_violation("measure_von_neumann: basis is not unitary");

    std::vector<MeasurementOutcome> outcomes;
    for (std::size_t k = 0; k < ds; ++k) {
        std::vector<cplx> column(ds);
        for (std::size_t r = 0; r < ds; ++r) column[r] = basis(r, k);
        auto [prob, post] = project_subsystem(rho, slot, column);
        outcomes.push_back({k, prob, std::move(post)});
    }
    return outcomes;
}

} // namespace coherence
