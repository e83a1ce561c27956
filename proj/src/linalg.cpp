#include "coherence/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "coherence/eig.hpp"
#include "coherence/errors.hpp"

namespace coherence {

namespace {

void check_subsystems(const std::vector<std::size_t>& subsystems, std::size_t count,
                      const char* who) {
    for (std::size_t s : subsystems)
        if (s >= count) throw contract_violation(std::string(who) + ": subsystem index out of range");
}

std::vector<std::size_t> complement_of(const std::vector<std::size_t>& chosen, std::size_t count) {
    std::vector<bool> in(count, false);
    for (std::size_t s : chosen) in[s] = true;
    std::vector<std::size_t> rest;
    for (std::size_t s = 0; s < count; ++s)
        if (!in[s]) rest.push_back(s);
    return rest;
}

} // namespace

std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> st(dims.size(), 1);
    for (std::size_t k = dims.size(); k-- > 1;) st[k - 1] = st[k] * dims[k];
    return st;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    std::vector<std::size_t> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return DensityMatrix::trusted(std::move(dims), kron(a.mat(), b.mat()));
}

PureState tensor(const PureState& a, const PureState& b) {
    std::vector<std::size_t> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    std::vector<cplx> v(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j) v[i * b.dim() + j] = a.vec()[i] * b.vec()[j];
    return PureState::trusted(std::move(dims), std::move(v));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& keep_in) {
    const std::size_t n = rho.subsystem_count();
    std::vector<std::size_t> keep = keep_in;
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    if (keep.empty())
        throw contract_violation("partial_trace: keep set must be non-empty; use trace() for scalars");
    check_subsystems(keep, n, "partial_trace");

    const std::vector<std::size_t> traced = complement_of(keep, n);
    const std::vector<std::size_t> strides = strides_of(rho.dims());

    std::vector<std::size_t> keep_dims, traced_dims;
    for (std::size_t s : keep) keep_dims.push_back(rho.dims()[s]);
    for (std::size_t s : traced) traced_dims.push_back(rho.dims()[s]);

    std::size_t dk = 1;
    for (std::size_t d : keep_dims) dk *= d;
    std::size_t dt = 1;
    for (std::size_t d : traced_dims) dt *= d;

    // Flat offsets contributed by each kept / traced multi-index.
    std::vector<std::size_t> keep_offset(dk, 0), traced_offset(dt, 0);
    for (std::size_t m = 0; m < dk; ++m) {
        std::size_t rem = m;
        for (std::size_t k = keep.size(); k-- > 0;) {
            keep_offset[m] += (rem % keep_dims[k]) * strides[keep[k]];
            rem /= keep_dims[k];
        }
    }
    for (std::size_t m = 0; m < dt; ++m) {
        std::size_t rem = m;
        for (std::size_t k = traced.size(); k-- > 0;) {
            traced_offset[m] += (rem % traced_dims[k]) * strides[traced[k]];
            rem /= traced_dims[k];
        }
    }

    ComplexMatrix out(dk, dk);
    for (std::size_t r = 0; r < dk; ++r)
        for (std::size_t c = 0; c < dk; ++c) {
            cplx sum = 0.0;
            for (std::size_t t = 0; t < dt; ++t)
                sum += rho.mat()(keep_offset[r] + traced_offset[t], keep_offset[c] + traced_offset[t]);
            out(r, c) = sum;
        }
    return DensityMatrix::trusted(std::move(keep_dims), std::move(out));
}

DensityMatrix dephase(const DensityMatrix& rho, const std::vector<std::size_t>& subsystems) {
    const std::size_t n = rho.subsystem_count();
    check_subsystems(subsystems, n, "dephase");
    const std::vector<std::size_t> strides = strides_of(rho.dims());
    const std::size_t d = rho.dim();

    ComplexMatrix out = rho.mat();
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            for (std::size_t s : subsystems) {
                const std::size_t ri = (r / strides[s]) % rho.dims()[s];
                const std::size_t ci = (c / strides[s]) % rho.dims()[s];
                if (ri != ci) {
                    out(r, c) = 0.0;
                    break;
                }
            }
        }
    return DensityMatrix::trusted(rho.dims(), std::move(out));
}

DensityMatrix dephase(const DensityMatrix& rho) {
    std::vector<std::size_t> all(rho.subsystem_count());
    for (std::size_t s = 0; s < all.size(); ++s) all[s] = s;
    return dephase(rho, all);
}

PureState purify(const DensityMatrix& rho) {
    const Spectrum spec = hermitian_eig(rho.mat());
    const std::size_t d = rho.dim();

    std::size_t rank = 0;
    for (double lam : spec.eigenvalues)
        if (lam > kSupportCutoff) ++rank;
    if (rank == 0) throw contract_violation("purify: state has empty support");

    std::vector<cplx> v(rank * d, 0.0);
    for (std::size_t k = 0; k < rank; ++k) {
        const double w = std::sqrt(spec.eigenvalues[k]);
        for (std::size_t i = 0; i < d; ++i) v[k * d + i] = w * spec.eigenvectors(i, k);
    }
    // Rounding in the retained eigenvalues can leave the norm a hair off 1.
    const double nv = norm(v);
    for (cplx& z : v) z /= nv;
    return PureState::trusted({rank, d}, std::move(v));
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dims() != sigma.dims())
        throw contract_violation("trace_distance: dimension mismatch");
    const Spectrum spec = hermitian_eig(rho.mat() - sigma.mat());
    double sum = 0.0;
    for (double lam : spec.eigenvalues) sum += std::abs(lam);
    return 0.5 * sum;
}

std::pair<double, DensityMatrix> project_subsystem(const DensityMatrix& rho, std::size_t slot,
                                                   const std::vector<cplx>& vec) {
    const std::size_t n = rho.subsystem_count();
    if (slot >= n) throw contract_violation("project_subsystem: slot out of range");
    if (n < 2)
        throw contract_violation("project_subsystem: need at least two subsystems");
    const std::size_t ds = rho.dims()[slot];
    if (vec.size() != ds) throw contract_violation("project_subsystem: vector length mismatch");

    const std::vector<std::size_t> strides = strides_of(rho.dims());
    const std::vector<std::size_t> rest = complement_of({slot}, n);

    std::vector<std::size_t> rest_dims;
    for (std::size_t s : rest) rest_dims.push_back(rho.dims()[s]);
    std::size_t dr = 1;
    for (std::size_t d : rest_dims) dr *= d;

    std::vector<std::size_t> rest_offset(dr, 0);
    for (std::size_t m = 0; m < dr; ++m) {
        std::size_t rem = m;
        for (std::size_t k = rest.size(); k-- > 0;) {
            rest_offset[m] += (rem % rest_dims[k]) * strides[rest[k]];
            rem /= rest_dims[k];
        }
    }

    // <v| rho |v> on the chosen slot.
    ComplexMatrix out(dr, dr);
    for (std::size_t r = 0; r < dr; ++r)
        for (std::size_t c = 0; c < dr; ++c) {
            cplx sum = 0.0;
            for (std::size_t a = 0; a < ds; ++a)
                for (std::size_t b = 0; b < ds; ++b)
                    sum += std::conj(vec[a]) * vec[b] *
                           rho.mat()(rest_offset[r] + a * strides[slot],
                                     rest_offset[c] + b * strides[slot]);
            out(r, c) = sum;
        }

    double prob = out.trace().real();
    if (prob < kSupportCutoff) return {std::max(prob, 0.0), DensityMatrix()};
    out *= cplx(1.0 / prob);
    return {prob, DensityMatrix::trusted(std::move(rest_dims), std::move(out))};
}

PureState permute_subsystems(const PureState& psi, const std::vector<std::size_t>& perm) {
    const std::size_t n = psi.dims().size();
    if (perm.size() != n) throw contract_violation("permute_subsystems: permutation length mismatch");
    std::vector<bool> seen(n, false);
    for (std::size_t p : perm) {
        if (p >= n || seen[p]) throw contract_violation("permute_subsystems: not a permutation");
        seen[p] = true;
    }

    std::vector<std::size_t> new_dims(n);
    for (std::size_t k = 0; k < n; ++k) new_dims[k] = psi.dims()[perm[k]];
    const std::vector<std::size_t> old_strides = strides_of(psi.dims());
    const std::vector<std::size_t> new_strides = strides_of(new_dims);

    std::vector<cplx> v(psi.dim());
    for (std::size_t idx = 0; idx < psi.dim(); ++idx) {
        std::size_t src = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t comp = (idx / new_strides[k]) % new_dims[k];
            src += comp * old_strides[perm[k]];
        }
        v[idx] = psi.vec()[src];
    }
    return PureState::trusted(std::move(new_dims), std::move(v));
}

DensityMatrix permute_subsystems(const DensityMatrix& rho, const std::vector<std::size_t>& perm) {
    const std::size_t n = rho.subsystem_count();
    if (perm.size() != n) throw contract_violation("permute_subsystems: permutation length mismatch");
    std::vector<bool> seen(n, false);
    for (std::size_t p : perm) {
        if (p >= n || seen[p]) throw contract_violation("permute_subsystems: not a permutation");
        seen[p] = true;
    }

    std::vector<std::size_t> new_dims(n);
    for (std::size_t k = 0; k < n; ++k) new_dims[k] = rho.dims()[perm[k]];
    const std::vector<std::size_t> old_strides = strides_of(rho.dims());
    const std::vector<std::size_t> new_strides = strides_of(new_dims);
    const std::size_t d = rho.dim();

    std::vector<std::size_t> src(d);
    for (std::size_t idx = 0; idx < d; ++idx) {
        std::size_t s = 0;
        for (std::size_t k = 0; k < n; ++k)
            s += ((idx / new_strides[k]) % new_dims[k]) * old_strides[perm[k]];
        src[idx] = s;
    }

    ComplexMatrix out(d, d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) out(r, c) = rho.mat()(src[r], src[c]);
    return DensityMatrix::trusted(std::move(new_dims), std::move(out));
}

PureState group_to_bipartite(const PureState& psi, std::size_t slot) {
    const std::size_t n = psi.dims().size();
    if (slot >= n) throw contract_violation("group_to_bipartite: slot out of range");
    if (n < 2) throw contract_violation("group_to_bipartite: need at least two subsystems");

    std::vector<std::size_t> perm;
    for (std::size_t s = 0; s < n; ++s)
        if (s != slot) perm.push_back(s);
    perm.push_back(slot);

    const PureState moved = permute_subsystems(psi, perm);
    const std::size_t db = psi.dims()[slot];
    return PureState::trusted({moved.dim() / db, db}, moved.vec());
}

} // namespace coherence
