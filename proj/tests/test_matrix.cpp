#include <doctest.h>
#include <stdexcept>

#include "oracles.hpp"
#include "tvg/matrix.hpp"
#include "tvg/rng.hpp"

using tvg::Matrix;

TEST_CASE("matrix multiply matches the naive triple loop") {
    tvg::Rng rng(11);
    const Matrix a = oracle::random_matrix(7, 5, rng);
    const Matrix b = oracle::random_matrix(5, 9, rng);
    const Matrix c = tvg::multiply(a, b);
    for (std::size_t i = 0; i < 7; ++i) {
        for (std::size_t j = 0; j < 9; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < 5; ++k) s += a(i, k) * b(k, j);
            CHECK(c(i, j) == doctest::Approx(s).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(tvg::multiply(a, a), std::invalid_argument);
}

TEST_CASE("transpose, hadamard, axpy, norms") {
    tvg::Rng rng(12);
    const Matrix a = oracle::random_matrix(4, 6, rng);
    const Matrix at = tvg::transpose(a);
    CHECK(at.rows() == 6);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 6; ++j) CHECK(at(j, i) == a(i, j));

    const Matrix h = tvg::hadamard(a, a);
    CHECK(h(2, 3) == a(2, 3) * a(2, 3));
    CHECK(tvg::frobenius_dot(a, a) == doctest::Approx(tvg::frobenius_norm(a) *
                                                      tvg::frobenius_norm(a)));

    Matrix y = a;
    tvg::axpy(-1.0, a, y);
    CHECK(tvg::max_abs(y) == 0.0);

    const Matrix eye = Matrix::identity(6);
    CHECK(oracle::rel_frobenius(tvg::multiply(a, eye), a) == 0.0);
}

TEST_CASE("matrix-vector multiply and dot") {
    Matrix a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = -1.0;
    a(1, 0) = -1.0;
    a(1, 1) = 1.0;
    const std::vector<double> x{1.0, -1.0};
    const auto y = tvg::multiply(a, x);
    CHECK(y[0] == 2.0);
    CHECK(y[1] == -2.0);
    CHECK(tvg::dot(x, y) == 4.0);
}

TEST_CASE("all_finite flags bad entries") {
    Matrix a(2, 2, 1.0);
    CHECK(tvg::all_finite(a));
    a(1, 1) = std::nan("");
    CHECK_FALSE(tvg::all_finite(a));
}
