#pragma once

// Minimal dense real linear algebra for realified MIMO sensing models:
// complex-to-real mappings, Kronecker products, one-sided Jacobi SVD,
// pseudoinverse of full-column-rank matrices, SPD Cholesky. Everything is
// row-major with explicit shapes; no implicit broadcasting.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace chanest {

using RealVector = std::vector<double>;
using ComplexVector = std::vector<std::complex<double>>;

// Thrown by pinv() when the smallest singular value falls below the
// numerical-rank tolerance (or the matrix has more columns than rows).
class RankError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RealMatrix {
public:
    RealMatrix() = default;
    RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static RealMatrix identity(std::size_t n) {
        RealMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::complex<double>& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    std::complex<double> operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const ComplexVector& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    ComplexVector data_;
};

// [Re(z); Im(z)] stacking: dim doubles, real parts first.
RealVector realify_vec(const ComplexVector& z);

// [[Re, -Im], [Im, Re]] block matrix: r x c -> 2r x 2c.
RealMatrix realify_mat(const ComplexMatrix& z);

// Column-blockwise realification: each column z_j of Z contributes
// [Re(z_j); Im(z_j)], blocks concatenated in column order. This is the
// stacking under which vec'd products of block-diagonal sensing matrices
// commute with realification (see build_sensing_matrix).
RealVector realify_cols(const ComplexMatrix& z);

RealMatrix kron(const RealMatrix& a, const RealMatrix& b);

RealMatrix transpose(const RealMatrix& a);
ComplexMatrix transpose(const ComplexMatrix& a);
RealMatrix matmul(const RealMatrix& a, const RealMatrix& b);
RealVector matvec(const RealMatrix& a, const RealVector& x);

double dot(const RealVector& a, const RealVector& b);
double norm2_sq(const RealVector& a);

// Sensing matrix of the realified vectorized model: I_N (x) realify_mat(X^T),
// shape 2NT x 2NM for an M x T pilot X and N receive antennas.
RealMatrix build_sensing_matrix(const ComplexMatrix& x, std::size_t n_rx);

// R_X = T^{-1} X X^H (Hermitian PSD, M x M).
ComplexMatrix sample_covariance(const ComplexMatrix& x);

// Realified sample covariance (2T)^{-1} (X^T bar)^T (X^T bar), 2M x 2M.
RealMatrix sample_covariance_realified(const ComplexMatrix& x);

struct SvdResult {
    RealMatrix u;      // rows x k, orthonormal columns for nonzero sigma
    RealVector sigma;  // nonincreasing, k = min(rows, cols)
    RealMatrix v;      // cols x k
};

// One-sided Jacobi SVD. Deterministic, accurate for the small dense
// matrices used here (a few hundred rows at most).
SvdResult jacobi_svd(const RealMatrix& a);

// Nonincreasing singular values; the minimum is the last entry.
RealVector singular_values(const RealMatrix& a);

// Moore-Penrose pseudoinverse restricted to full-column-rank inputs
// (rows >= cols). Throws RankError when
// sigma_min < 1e-12 * sigma_max * max(rows, cols).
RealMatrix pinv(const RealMatrix& a);

// Eigenvalues of a symmetric matrix via cyclic Jacobi, nonincreasing.
RealVector symmetric_eigenvalues(const RealMatrix& s);

struct Cholesky {
    RealMatrix lower;
    double log_det = 0.0;  // log det of the factored matrix
};

// Factor an SPD matrix; throws std::domain_error if a pivot is not positive.
Cholesky cholesky(const RealMatrix& s);
RealVector cholesky_solve(const Cholesky& f, const RealVector& rhs);
RealMatrix cholesky_inverse(const Cholesky& f);

}  // namespace chanest
