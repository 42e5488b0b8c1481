#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <tuple>

#include "esmda/la.hpp"
#include "esmda/rng.hpp"

using esmda::la::Matrix;
using esmda::la::Vector;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t tag) {
    esmda::rng::StreamFactory streams(0x1a);
    auto s = streams.stream(esmda::rng::Purpose::prior_sample, tag, 0);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m(i, j) = 2.0 * s.next_uniform() - 1.0;
    return m;
}

Matrix random_spd(std::size_t n, std::uint64_t tag) {
    const Matrix b = random_matrix(n, n + 2, tag);
    Matrix a = esmda::la::matmul_abt(b, b);
    for (std::size_t i = 0; i < n; ++i)
        a(i, i) += 0.5; // keep it comfortably positive definite
    return a;
}

/// a reconstructed from the factors, entry by entry.
double reconstruction_error(const Matrix& a, const esmda::la::ThinSvd& svd) {
    double worst = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) {
            double v = 0.0;
            for (std::size_t i = 0; i < svd.singular.size(); ++i)
                v += svd.singular[i] * svd.left_t(i, r) * svd.right_t(i, c);
            worst = std::max(worst, std::abs(v - a(r, c)));
        }
    return worst;
}

double orthonormality_error(const Matrix& vectors_t, std::size_t count,
                            std::size_t length) {
    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = 0; j < count; ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < length; ++k)
                d += vectors_t(i, k) * vectors_t(j, k);
            worst = std::max(worst, std::abs(d - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

} // namespace

TEST_CASE("matrix basics") {
    const Matrix eye = Matrix::identity(3);
    CHECK(eye(0, 0) == 1.0);
    CHECK(eye(0, 1) == 0.0);
    const Matrix d = Matrix::diagonal({2.0, 3.0});
    CHECK(d(0, 0) == 2.0);
    CHECK(d(1, 1) == 3.0);
    CHECK(d(1, 0) == 0.0);

    Matrix a(2, 3);
    a(0, 0) = 1.0;
    a(1, 2) = -5.0;
    const Matrix t = esmda::la::transpose(a);
    CHECK(t.rows() == 3);
    CHECK(t.cols() == 2);
    CHECK(t(0, 0) == 1.0);
    CHECK(t(2, 1) == -5.0);
    CHECK(esmda::la::max_abs(a) == 5.0);
    CHECK(a.all_finite());
    a(0, 1) = std::nan("");
    CHECK_FALSE(a.all_finite());
}

TEST_CASE("products match the brute-force definition") {
    const Matrix a = random_matrix(4, 6, 1);
    const Matrix b = random_matrix(6, 3, 2);
    const Matrix c = esmda::la::matmul(a, b);
    REQUIRE(c.rows() == 4);
    REQUIRE(c.cols() == 3);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            double v = 0.0;
            for (std::size_t k = 0; k < 6; ++k)
                v += a(i, k) * b(k, j);
            CHECK(c(i, j) == doctest::Approx(v).epsilon(1e-13));
        }

    const Matrix bt = esmda::la::transpose(b);
    const Matrix c2 = esmda::la::matmul_abt(a, bt);
    CHECK(esmda::la::max_abs_diff(c, c2) <= 1e-13);

    const Vector x = {1.0, -2.0, 0.5, 3.0, 1.5, -1.0};
    const Vector y = esmda::la::matvec(a, x);
    for (std::size_t i = 0; i < 4; ++i) {
        double v = 0.0;
        for (std::size_t k = 0; k < 6; ++k)
            v += a(i, k) * x[k];
        CHECK(y[i] == doctest::Approx(v).epsilon(1e-13));
    }

    CHECK_THROWS_AS(esmda::la::matmul(a, a), std::invalid_argument);
    CHECK_THROWS_AS(esmda::la::matvec(a, {1.0}), std::invalid_argument);
}

TEST_CASE("cholesky of a known matrix") {
    Matrix a(2, 2);
    a(0, 0) = 4.0;
    a(0, 1) = 2.0;
    a(1, 0) = 2.0;
    a(1, 1) = 3.0;
    const auto res = esmda::la::cholesky(a);
    REQUIRE(res.ok);
    CHECK(res.lower(0, 0) == 2.0);
    CHECK(res.lower(0, 1) == 0.0);
    CHECK(res.lower(1, 0) == 1.0);
    CHECK(res.lower(1, 1) == std::sqrt(2.0));

    Vector rhs = {8.0, 7.0};
    esmda::la::cholesky_solve_in_place(res.lower, rhs);
    CHECK(rhs[0] == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(rhs[1] == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("cholesky reports the pivot that lost positivity") {
    Matrix a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0;
    a(1, 0) = 2.0;
    a(1, 1) = 1.0; // indefinite
    const auto res = esmda::la::cholesky(a);
    CHECK_FALSE(res.ok);
    CHECK(res.failed_index == 1);
}

TEST_CASE("block solve agrees with per-column solves") {
    const std::size_t n = 5;
    const Matrix a = random_spd(n, 3);
    const auto chol = esmda::la::cholesky(a);
    REQUIRE(chol.ok);

    Matrix b = random_matrix(n, 4, 4);
    Matrix solved = b;
    esmda::la::cholesky_solve_rows(chol.lower, solved);
    for (std::size_t col = 0; col < 4; ++col) {
        Vector rhs(n);
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = b(i, col);
        esmda::la::cholesky_solve_in_place(chol.lower, rhs);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(solved(i, col) == doctest::Approx(rhs[i]).epsilon(1e-12));
    }

    // And the solution actually solves the system.
    const Matrix back = esmda::la::matmul(a, solved);
    CHECK(esmda::la::max_abs_diff(back, b) <= 1e-10);
}

TEST_CASE("thin SVD of a known matrix") {
    Matrix a(2, 2);
    a(0, 0) = 3.0;
    a(0, 1) = 0.0;
    a(1, 0) = 4.0;
    a(1, 1) = 5.0;
    const auto svd = esmda::la::thin_svd(a);
    REQUIRE(svd.singular.size() == 2);
    // Singular values of [[3,0],[4,5]] are sqrt(45) and sqrt(5).
    CHECK(svd.singular[0] ==
          doctest::Approx(6.708203932499369).epsilon(1e-12));
    CHECK(svd.singular[1] ==
          doctest::Approx(2.23606797749979).epsilon(1e-12));
    CHECK(reconstruction_error(a, svd) <= 1e-12);
    CHECK(orthonormality_error(svd.left_t, 2, 2) <= 1e-12);
    CHECK(orthonormality_error(svd.right_t, 2, 2) <= 1e-12);
}

TEST_CASE("thin SVD across shapes") {
    for (const auto& [rows, cols, tag] :
         {std::tuple<std::size_t, std::size_t, std::uint64_t>{7, 4, 10},
          {4, 7, 11},
          {6, 6, 12},
          {30, 5, 13}}) {
        CAPTURE(rows);
        CAPTURE(cols);
        const Matrix a = random_matrix(rows, cols, tag);
        const std::size_t k = std::min(rows, cols);
        const auto svd = esmda::la::thin_svd(a);
        REQUIRE(svd.singular.size() == k);
        REQUIRE(svd.left_t.rows() == k);
        REQUIRE(svd.left_t.cols() == rows);
        REQUIRE(svd.right_t.rows() == k);
        REQUIRE(svd.right_t.cols() == cols);
        for (std::size_t i = 0; i + 1 < k; ++i)
            CHECK(svd.singular[i] >= svd.singular[i + 1]);
        CHECK(svd.singular[k - 1] > 0.0); // random input: full rank
        CHECK(reconstruction_error(a, svd) <= 1e-12);
        CHECK(orthonormality_error(svd.left_t, k, rows) <= 1e-12);
        CHECK(orthonormality_error(svd.right_t, k, cols) <= 1e-12);
    }
}

TEST_CASE("thin SVD keeps an exactly-zero column exactly zero") {
    Matrix a(2, 2);
    a(0, 0) = 1.0; // second column all zero
    const auto svd = esmda::la::thin_svd(a);
    CHECK(svd.singular[0] == 1.0);
    CHECK(svd.singular[1] == 0.0);
    CHECK(svd.left_t(1, 0) == 0.0);
    CHECK(svd.left_t(1, 1) == 0.0);
}

TEST_CASE("symmetric eigenvalues") {
    Matrix a(2, 2);
    a(0, 0) = 2.0;
    a(0, 1) = 1.0;
    a(1, 0) = 1.0;
    a(1, 1) = 2.0;
    const Vector eig = esmda::la::symmetric_eigenvalues(a);
    REQUIRE(eig.size() == 2);
    CHECK(eig[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eig[1] == doctest::Approx(3.0).epsilon(1e-12));

    const std::size_t n = 5;
    Matrix s = random_matrix(n, n, 20);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            s(j, i) = s(i, j);
    const Vector ev = esmda::la::symmetric_eigenvalues(s);
    double trace = 0.0;
    double frob2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        trace += s(i, i);
        for (std::size_t j = 0; j < n; ++j)
            frob2 += s(i, j) * s(i, j);
    }
    double ev_sum = 0.0;
    double ev_sq = 0.0;
    for (double v : ev) {
        ev_sum += v;
        ev_sq += v * v;
    }
    CHECK(ev_sum == doctest::Approx(trace).epsilon(1e-10));
    CHECK(ev_sq == doctest::Approx(frob2).epsilon(1e-10));
}
