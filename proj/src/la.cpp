#include "esmda/la.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "esmda/kernels.hpp"

namespace esmda::la {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(const Vector& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        m(i, i) = d[i];
    return m;
}

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            t(j, i) = a(i, j);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: inner dimensions disagree");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k)
            kernels::axpy(a(i, k), b.row(k), c.row(i), b.cols());
    return c;
}

Matrix matmul_abt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("matmul_abt: inner dimensions disagree");
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j)
            c(i, j) = kernels::dot(a.row(i), b.row(j), a.cols());
    return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size())
        throw std::invalid_argument("matvec: dimensions disagree");
    Vector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        y[i] = kernels::dot(a.row(i), x.data(), a.cols());
    return y;
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
        m = std::max(m, std::abs(a.data()[i]));
    return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("max_abs_diff: shapes disagree");
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

CholeskyResult cholesky(const Matrix& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("cholesky: matrix not square");
    const std::size_t n = a.rows();
    CholeskyResult res;
    res.lower = Matrix(n, n);
    Matrix& l = res.lower;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double s = kernels::dot(l.row(i), l.row(j), j);
            l(i, j) = (a(i, j) - s) / l(j, j);
        }
        const double d = a(i, i) - kernels::dot(l.row(i), l.row(i), i);
        if (!(d > 0.0) || !std::isfinite(d)) {
            res.ok = false;
            res.failed_index = i;
            return res;
        }
        l(i, i) = std::sqrt(d);
    }
    res.ok = true;
    return res;
}

void cholesky_solve_in_place(const Matrix& lower, Vector& rhs) {
    const std::size_t n = lower.rows();
    if (rhs.size() != n)
        throw std::invalid_argument("cholesky_solve: dimensions disagree");
    for (std::size_t i = 0; i < n; ++i) {
        const double s = kernels::dot(lower.row(i), rhs.data(), i);
        rhs[i] = (rhs[i] - s) / lower(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = 0.0;
        for (std::size_t k = ii + 1; k < n; ++k)
            s += lower(k, ii) * rhs[k];
        rhs[ii] = (rhs[ii] - s) / lower(ii, ii);
    }
}

void cholesky_solve_rows(const Matrix& lower, Matrix& b) {
    const std::size_t n = lower.rows();
    if (b.rows() != n)
        throw std::invalid_argument("cholesky_solve_rows: dimensions disagree");
    const std::size_t k = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j)
            kernels::axpy(-lower(i, j), b.row(j), b.row(i), k);
        kernels::scal(1.0 / lower(i, i), b.row(i), k);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n; ++j)
            kernels::axpy(-lower(j, ii), b.row(j), b.row(ii), k);
        kernels::scal(1.0 / lower(ii, ii), b.row(ii), k);
    }
}

ThinSvd thin_svd(const Matrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    // One-sided Jacobi only converges with at most as many columns as
    // rows. A wide input is decomposed through its transpose, which swaps
    // the roles of the two factors.
    if (m < n) {
        ThinSvd of_transpose = thin_svd(transpose(a));
        ThinSvd out;
        out.singular = std::move(of_transpose.singular);
        out.left_t = std::move(of_transpose.right_t);
        out.right_t = std::move(of_transpose.left_t);
        return out;
    }
    // One-sided Jacobi orthogonalizes the columns of `a`. Work on the
    // transpose so each column is a contiguous row for the rotation kernel.
    Matrix w = transpose(a); // n-by-m, row i is column i of a
    Matrix vt = Matrix::identity(n);

    constexpr double kTol = 1e-15;
    constexpr int kMaxSweeps = 60;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double app = kernels::dot(w.row(p), w.row(p), m);
                const double aqq = kernels::dot(w.row(q), w.row(q), m);
                const double apq = kernels::dot(w.row(p), w.row(q), m);
                if (std::abs(apq) <= kTol * std::sqrt(app * aqq) || apq == 0.0)
                    continue;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                kernels::rot(w.row(p), w.row(q), c, s, m);
                kernels::rot(vt.row(p), vt.row(q), c, s, n);
                rotated = true;
            }
        }
        if (!rotated)
            break;
    }

    ThinSvd svd;
    svd.singular.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        svd.singular[i] = std::sqrt(kernels::dot(w.row(i), w.row(i), m));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return svd.singular[x] > svd.singular[y];
    });

    ThinSvd out;
    out.singular.resize(n);
    out.left_t = Matrix(n, m);
    out.right_t = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = order[i];
        const double s = svd.singular[src];
        out.singular[i] = s;
        if (s > 0.0)
            kernels::shift_scale(w.row(src), 0.0, 1.0 / s, out.left_t.row(i), m);
        std::copy(vt.row(src), vt.row(src) + n, out.right_t.row(i));
    }
    return out;
}

Vector symmetric_eigenvalues(Matrix a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("symmetric_eigenvalues: matrix not square");
    const std::size_t n = a.rows();
    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off += a(p, q) * a(p, q);
        if (off <= 1e-30 * std::max(1.0, max_abs(a) * max_abs(a)))
            break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0)
                    continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    Vector eig(n);
    for (std::size_t i = 0; i < n; ++i)
        eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

} // namespace esmda::la
