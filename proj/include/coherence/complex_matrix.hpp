#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace coherence {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. The workhorse container for operators,
/// Kraus elements and eigenvector tables.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols) {}
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return entries_.empty(); }

    cplx& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    std::span<const cplx> data() const { return entries_; }
    std::span<cplx> data() { return entries_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;
    ComplexMatrix conj() const;

    cplx trace() const;
    double frobenius_norm() const;
    double max_abs() const;
    bool all_finite() const;
    bool is_hermitian(double tol) const;
    // Max entrywise deviation of A A^dagger and A^dagger A from the identity.
    double unitarity_defect() const;

    ComplexMatrix& operator+=(const ComplexMatrix& rhs);
    ComplexMatrix& operator-=(const ComplexMatrix& rhs);
    ComplexMatrix& operator*=(cplx s);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> entries_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product; the left factor owns the slow (most significant) index.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

double max_abs_difference(const ComplexMatrix& a, const ComplexMatrix& b);

} // namespace coherence
