#pragma once

#include <cstddef>
#include <vector>

// Small dense linear-algebra layer. Matrices are row-major so that the
// hot products (anomaly cross products, triangular solves over many
// right-hand sides, Jacobi rotations) run as contiguous kernel calls.

namespace esmda::la {

using Vector = std::vector<double>;

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, value) {}

    static Matrix identity(std::size_t n);
    static Matrix diagonal(const Vector& d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) {
        return data_[i * cols_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        return data_[i * cols_ + j];
    }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    bool all_finite() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix transpose(const Matrix& a);

/// c = a * b, a is m-by-k, b is k-by-n.
Matrix matmul(const Matrix& a, const Matrix& b);

/// c = a * b^T, a is m-by-k, b is n-by-k. Row-dot form, the preferred
/// product for anomaly matrices.
Matrix matmul_abt(const Matrix& a, const Matrix& b);

Vector matvec(const Matrix& a, const Vector& x);

double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Cholesky factorization a = L L^T of a symmetric positive-definite
/// matrix. On breakdown `ok` is false and `failed_index` is the pivot row
/// where the factorization lost positivity.
struct CholeskyResult {
    Matrix lower;
    bool ok = false;
    std::size_t failed_index = 0;
};
CholeskyResult cholesky(const Matrix& a);

/// Solves L L^T x = rhs in place.
void cholesky_solve_in_place(const Matrix& lower, Vector& rhs);

/// Solves L L^T X = B in place, where B is n-by-k and each of the n block
/// rows is eliminated with length-k kernel operations.
void cholesky_solve_rows(const Matrix& lower, Matrix& b);

/// Thin SVD a = U S V^T of an m-by-n matrix via one-sided Jacobi, returned
/// in transposed layout with k = min(m, n) modes: row i of `left_t`
/// (k-by-m) is the i-th left singular vector, row i of `right_t` (k-by-n)
/// the i-th right singular vector. Singular values are sorted descending.
/// Rows paired with an exactly-zero singular value are left zero instead
/// of being completed to an arbitrary orthonormal basis.
struct ThinSvd {
    Matrix left_t;
    Vector singular;
    Matrix right_t;
};
ThinSvd thin_svd(const Matrix& a);

/// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
Vector symmetric_eigenvalues(Matrix a);

} // namespace esmda::la
