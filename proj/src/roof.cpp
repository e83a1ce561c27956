#include "coherence/roof.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <utility>

#include "coherence/eig.hpp"
#include "coherence/errors.hpp"
#include "coherence/measures.hpp"

namespace coherence {

namespace {

constexpr double kMemberCutoff = 1e-15;
constexpr double kGoldenTol = 1e-8;
constexpr std::size_t kGridPoints = 64;

struct SearchPoint {
    double x = 0.0;
    double value = 0.0;
};

/// 64-point grid scan followed by golden-section refinement inside the best
/// grid cell. Returns the best point seen anywhere.
template <typename F>
SearchPoint maximize_1d(F&& f, double lo, double hi) {
    const double step = (hi - lo) / static_cast<double>(kGridPoints);
    SearchPoint best{lo, f(lo)};
    for (std::size_t k = 1; k <= kGridPoints; ++k) {
        const double x = lo + step * static_cast<double>(k);
        const double v = f(x);
        if (v > best.value) best = {x, v};
    }

    double a = std::max(lo, best.x - step);
    double b = std::min(hi, best.x + step);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    if (fc > best.value) best = {c, fc};
    if (fd > best.value) best = {d, fd};
    while (b - a > kGoldenTol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            if (fc > best.value) best = {c, fc};
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            if (fd > best.value) best = {d, fd};
        }
    }
    return best;
}

/// State of one restart: the m x d table of subnormalized member vectors.
/// Row i is psi~_i; the Gram identity sum_i |psi~_i><psi~_i| = rho is
/// preserved by every two-row rotation.
class RestartState {
public:
    RestartState(std::size_t m, std::size_t d, const PureObjective& objective, double sign)
        : m_(m), d_(d), objective_(objective), sign_(sign), rows_(m * d),
          member_value_(m, 0.0), u_(d), w_(d), normed_(d) {}

    std::span<cplx> row(std::size_t i) { return {rows_.data() + i * d_, d_}; }
    std::span<const cplx> row(std::size_t i) const { return {rows_.data() + i * d_, d_}; }

    void refresh_all_members() {
        total_ = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            member_value_[i] = contribution(row(i));
            total_ += member_value_[i];
        }
    }

    double total() const { return total_; }

    /// Objective of the two rows after the rotation
    ///   u = cos(t) r_i + sin(t) e^{i p} r_j
    ///   w = -sin(t) e^{-i p} r_i + cos(t) r_j.
    double pair_value(std::size_t i, std::size_t j, double theta, double phi) {
        const double c = std::cos(theta), s = std::sin(theta);
        const cplx e{std::cos(phi), std::sin(phi)};
        const cplx se = s * e, sec = s * std::conj(e);
        const auto ri = row(i), rj = row(j);
        for (std::size_t k = 0; k < d_; ++k) {
            u_[k] = c * ri[k] + se * rj[k];
            w_[k] = -sec * ri[k] + c * rj[k];
        }
        return contribution(u_) + contribution(w_);
    }

    void apply_rotation(std::size_t i, std::size_t j, double theta, double phi) {
        const double c = std::cos(theta), s = std::sin(theta);
        const cplx e{std::cos(phi), std::sin(phi)};
        const cplx se = s * e, sec = s * std::conj(e);
        auto ri = row(i), rj = row(j);
        for (std::size_t k = 0; k < d_; ++k) {
            const cplx a = ri[k], b = rj[k];
            ri[k] = c * a + se * b;
            rj[k] = -sec * a + c * b;
        }
        total_ -= member_value_[i] + member_value_[j];
        member_value_[i] = contribution(ri);
        member_value_[j] = contribution(rj);
        total_ += member_value_[i] + member_value_[j];
    }

    double member_pair_total(std::size_t i, std::size_t j) const {
        return member_value_[i] + member_value_[j];
    }

    std::size_t members() const { return m_; }
    std::size_t dim() const { return d_; }

private:
    double contribution(std::span<const cplx> x) {
        double q = 0.0;
        for (const cplx& z : x) q += std::norm(z);
        if (q < kMemberCutoff) return 0.0;
        const double inv = 1.0 / std::sqrt(q);
        for (std::size_t k = 0; k < d_; ++k) normed_[k] = x[k] * inv;
        return q * sign_ * objective_(normed_);
    }

    std::size_t m_, d_;
    const PureObjective& objective_;
    double sign_;
    std::vector<cplx> rows_;
    std::vector<double> member_value_;
    std::vector<cplx> u_, w_, normed_;
    double total_ = 0.0;
};

/// Sweep refinement of one restart. Returns true when the final sweep
/// improved by less than tol.
bool optimize_restart(RestartState& st, double tol, std::size_t max_sweeps) {
    const std::size_t m = st.members();
    if (m < 2) return true;
    constexpr double half_pi = std::numbers::pi / 2.0;
    constexpr double pi = std::numbers::pi;

    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        const double sweep_start = st.total();
        for (std::size_t i = 0; i + 1 < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                const double base = st.member_pair_total(i, j);

                const SearchPoint real_axis =
                    maximize_1d([&](double t) { return st.pair_value(i, j, t, 0.0); }, -half_pi,
                                half_pi);
                const SearchPoint imag_axis = maximize_1d(
                    [&](double t) { return st.pair_value(i, j, t, half_pi); }, -half_pi, half_pi);

                double theta = real_axis.x, phi = 0.0, value = real_axis.value;
                if (imag_axis.value > value) {
                    theta = imag_axis.x;
                    phi = half_pi;
                    value = imag_axis.value;
                }
                // The two angle sections pass through the identity rotation;
                // when neither improves, the phase stage would search a flat
                // section and can be skipped.
                if (value <= base + 1e-13) continue;

                const SearchPoint phase =
                    maximize_1d([&](double p) { return st.pair_value(i, j, theta, p); }, -pi, pi);
                if (phase.value > value) {
                    phi = phase.x;
                    value = phase.value;
                }
                const SearchPoint refined =
                    maximize_1d([&](double t) { return st.pair_value(i, j, t, phi); }, -half_pi,
                                half_pi);
                if (refined.value > value) {
                    theta = refined.x;
                    value = refined.value;
                }

                if (value > base + 1e-15) st.apply_rotation(i, j, theta, phi);
            }
        }
        if (st.total() - sweep_start < tol) return true;
    }
    return false;
}

} // namespace

double ensemble_defect(const Ensemble& ensemble, const DensityMatrix& target) {
    const std::size_t d = target.dim();
    ComplexMatrix acc(d, d);
    for (const EnsembleMember& mem : ensemble.members)
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c)
                acc(r, c) += mem.probability * mem.state.vec()[r] * std::conj(mem.state.vec()[c]);
    return max_abs_difference(acc, target.mat());
}

IsometryParam IsometryParam::make(ComplexMatrix m) {
    if (m.rows() < m.cols()) throw contract_violation("IsometryParam: need rows >= cols");
    const ComplexMatrix gram = m.adjoint() * m;
    if (max_abs_difference(gram, ComplexMatrix::identity(m.cols())) > 1e-10)
        throw contract_violation("IsometryParam: columns not orthonormal within 1e-10");
    return IsometryParam{std::move(m)};
}

IsometryParam IsometryParam::haar(std::size_t m, std::size_t r, SplitMix64& rng) {
    return IsometryParam{haar_isometry(m, r, rng)};
}

RoofResult roof_optimize(const DensityMatrix& rho, const PureObjective& objective,
                         RoofDirection direction, const RoofConfig& config) {
    if (config.restarts < 1) throw contract_violation("roof_optimize: restarts must be >= 1");

    const Spectrum spec = hermitian_eig(rho.mat());
    const std::size_t d = rho.dim();

    std::size_t rank = 0;
    for (double lam : spec.eigenvalues)
        if (lam > kSupportCutoff) ++rank;
    if (rank == 0) throw contract_violation("roof_optimize: state has empty support");

    const double sign = direction == RoofDirection::maximize ? 1.0 : -1.0;

    // Weighted eigenvector table P: row k is sqrt(lambda_k) v_k.
    std::vector<cplx> weighted(rank * d);
    for (std::size_t k = 0; k < rank; ++k) {
        const double w = std::sqrt(std::max(spec.eigenvalues[k], 0.0));
        for (std::size_t i = 0; i < d; ++i) weighted[k * d + i] = w * spec.eigenvectors(i, k);
    }

    RoofResult result;
    result.restarts_used = config.restarts;
    result.ensemble.source_dims = rho.dims();

    if (rank == 1) {
        // Unique decomposition: nothing to optimize.
        std::vector<cplx> v(weighted.begin(), weighted.end());
        const double nv = norm(v);
        for (cplx& z : v) z /= nv;
        const PureState psi = PureState::trusted(rho.dims(), std::move(v));
        result.value = objective(psi.vec());
        result.ensemble.members.push_back({1.0, psi});
        result.converged = true;
        result.best_history.assign(config.restarts, result.value);
        return result;
    }

    const std::size_t m = config.ensemble_cap == 0 ? rank * rank : config.ensemble_cap;
    if (m < rank) throw contract_violation("roof_optimize: ensemble cap below the state rank");

    double best_signed = 0.0;
    bool best_converged = false;
    std::vector<cplx> best_rows;
    bool have_best = false;

    for (std::size_t restart = 0; restart < config.restarts; ++restart) {
        RestartState st(m, d, objective, sign);
        if (restart == 0) {
            // Eigendecomposition start: top rows are P itself.
            std::copy(weighted.begin(), weighted.end(), st.row(0).data());
        } else {
            SplitMix64 rng(config.seed + restart);
            const IsometryParam v = IsometryParam::haar(m, rank, rng);
            for (std::size_t i = 0; i < m; ++i) {
                auto dst = st.row(i);
                for (std::size_t k = 0; k < rank; ++k) {
                    const cplx vik = v.matrix(i, k);
                    if (vik == cplx(0.0)) continue;
                    for (std::size_t c = 0; c < d; ++c) dst[c] += vik * weighted[k * d + c];
                }
            }
        }
        st.refresh_all_members();
        const bool converged = optimize_restart(st, config.tol, config.max_sweeps);

        result.best_history.push_back(sign * st.total());
        if (!have_best || st.total() > best_signed) {
            have_best = true;
            best_signed = st.total();
            best_converged = converged;
            best_rows.assign(st.row(0).data(), st.row(0).data() + m * d);
        }
    }

    result.converged = best_converged;

    double value = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<cplx> v(best_rows.begin() + i * d, best_rows.begin() + (i + 1) * d);
        double q = 0.0;
        for (const cplx& z : v) q += std::norm(z);
        if (q < 1e-12) continue;
        const double inv = 1.0 / std::sqrt(q);
        for (cplx& z : v) z *= inv;
        const PureState psi = PureState::trusted(rho.dims(), std::move(v));
        value += q * objective(psi.vec());
        result.ensemble.members.push_back({q, psi});
    }
    result.value = value;
    return result;
}

RoofResult coherence_of_assistance(const DensityMatrix& rho, const RoofConfig& config) {
    PureObjective dephased_entropy = [](std::span<const cplx> psi) {
        double h = 0.0;
        for (const cplx& z : psi) {
            const double p = std::norm(z);
            if (p > 0.0) h -= p * std::log2(p);
        }
        return h;
    };
    return roof_optimize(rho, dephased_entropy, RoofDirection::maximize, config);
}

RoofResult coherence_of_formation(const DensityMatrix& rho, const RoofConfig& config) {
    PureObjective dephased_entropy = [](std::span<const cplx> psi) {
        double h = 0.0;
        for (const cplx& z : psi) {
            const double p = std::norm(z);
            if (p > 0.0) h -= p * std::log2(p);
        }
        return h;
    };
    return roof_optimize(rho, dephased_entropy, RoofDirection::minimize, config);
}

namespace {

double binary_spectrum_entropy(double tr, double det) {
    const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
    double h = 0.0;
    for (double lam : {0.5 * (tr + disc), 0.5 * (tr - disc)})
        if (lam > 1e-15) h -= lam * std::log2(lam);
    return h;
}

// Entropy of a 3x3 Hermitian PSD matrix through the characteristic cubic;
// allocation-free for the optimizer's hot path.
double ternary_spectrum_entropy(const std::array<double, 3>& diag, const cplx& m01,
                                const cplx& m02, const cplx& m12) {
    const double tr = diag[0] + diag[1] + diag[2];
    const double minors = diag[0] * diag[1] - std::norm(m01) + diag[0] * diag[2] -
                          std::norm(m02) + diag[1] * diag[2] - std::norm(m12);
    const double det = diag[0] * (diag[1] * diag[2] - std::norm(m12)) -
                       (m01 * (std::conj(m01) * diag[2] - m12 * std::conj(m02))).real() +
                       (m02 * (std::conj(m01) * std::conj(m12) - diag[1] * std::conj(m02))).real();

    const double a = -tr, b = minors, c = -det;
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;

    double h = 0.0;
    if (p > -1e-30) {
        const double lam = tr / 3.0;
        if (lam > 1e-15) h = -3.0 * lam * std::log2(lam);
        return h;
    }
    const double mfac = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * mfac), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
        const double lam =
            mfac * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - a / 3.0;
        if (lam > 1e-15) h -= lam * std::log2(lam);
    }
    return h;
}

} // namespace

RoofResult entanglement_of_assistance(const DensityMatrix& rho, const RoofConfig& config) {
    if (rho.subsystem_count() != 2)
        throw contract_violation("entanglement_of_assistance: state must be bipartite");
    const std::size_t da = rho.dims()[0];
    const std::size_t db = rho.dims()[1];

    // Entropy of the first marginal of a pure bipartite state. The 2x2 and
    // 3x3 cases sit on the optimizer's hot path, so they bypass the
    // iterative solver.
    auto reduced = std::make_shared<ComplexMatrix>(da, da);
    PureObjective entanglement_entropy = [da, db, reduced](std::span<const cplx> psi) {
        if (da == 2) {
            double p00 = 0.0, p11 = 0.0;
            cplx p01 = 0.0;
            for (std::size_t b = 0; b < db; ++b) {
                p00 += std::norm(psi[b]);
                p11 += std::norm(psi[db + b]);
                p01 += psi[b] * std::conj(psi[db + b]);
            }
            return binary_spectrum_entropy(p00 + p11, p00 * p11 - std::norm(p01));
        }
        if (da == 3) {
            std::array<double, 3> diag{};
            cplx m01 = 0.0, m02 = 0.0, m12 = 0.0;
            for (std::size_t b = 0; b < db; ++b) {
                const cplx x0 = psi[b], x1 = psi[db + b], x2 = psi[2 * db + b];
                diag[0] += std::norm(x0);
                diag[1] += std::norm(x1);
                diag[2] += std::norm(x2);
                m01 += x0 * std::conj(x1);
                m02 += x0 * std::conj(x2);
                m12 += x1 * std::conj(x2);
            }
            return ternary_spectrum_entropy(diag, m01, m02, m12);
        }
        for (std::size_t a = 0; a < da; ++a)
            for (std::size_t ap = 0; ap < da; ++ap) {
                cplx sum = 0.0;
                for (std::size_t b = 0; b < db; ++b)
                    sum += psi[a * db + b] * std::conj(psi[ap * db + b]);
                (*reduced)(a, ap) = sum;
            }
        const Spectrum s = hermitian_eig(*reduced);
        double h = 0.0;
        for (double lam : s.eigenvalues)
            if (lam > 1e-15) h -= lam * std::log2(lam);
        return h;
    };
    return roof_optimize(rho, entanglement_entropy, RoofDirection::maximize, config);
}

} // namespace coherence
