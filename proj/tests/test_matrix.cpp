#include <doctest.h>

#include <cmath>

#include "gia/error.hpp"
#include "gia/matrix.hpp"
#include "gia/rng.hpp"
#include "oracles.hpp"

using gia::Matrix;
namespace ops = gia::ops;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, gia::Rng& rng) {
    Matrix m(r, c);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return m;
}

}  // namespace

TEST_CASE("matmul identity passes input through") {
    const Matrix eye = Matrix::identity(2);
    const Matrix b(2, 2, {3, 4, 5, 6});
    const Matrix c = ops::matmul(eye, b);
    CHECK(c == b);
}

TEST_CASE("matmul 1x2 by 2x1") {
    const Matrix a(1, 2, {1, 2});
    const Matrix b(2, 1, {3, 4});
    const Matrix c = ops::matmul(a, b);
    REQUIRE(c.rows() == 1);
    REQUIRE(c.cols() == 1);
    CHECK(c(0, 0) == doctest::Approx(11.0).epsilon(1e-15));
}

TEST_CASE("matmul matches triple-loop reference") {
    gia::Rng rng(7);
    const Matrix a = random_matrix(5, 3, rng);
    const Matrix b = random_matrix(3, 4, rng);
    const Matrix c = ops::matmul(a, b);
    const auto expected = oracle::triple_loop_matmul(oracle::to_grid(a), oracle::to_grid(b));
    CHECK(oracle::max_abs_diff(c, expected) < 1e-12 * std::max(1.0, oracle::max_abs(expected)));
}

TEST_CASE("matmul rejects mismatched shapes naming both") {
    const Matrix a(5, 3), b(4, 2);
    CHECK_THROWS_WITH_AS(ops::matmul(a, b), doctest::Contains("5x3"), gia::ShapeError);
    CHECK_THROWS_WITH_AS(ops::matmul(a, b), doctest::Contains("4x2"), gia::ShapeError);
}

TEST_CASE("matmul_at and matmul_bt agree with explicit transposes") {
    gia::Rng rng(11);
    const Matrix a = random_matrix(6, 3, rng);
    const Matrix b = random_matrix(6, 4, rng);
    CHECK(ops::matmul_at(a, b) == ops::matmul(ops::transpose(a), b));
    const Matrix c = random_matrix(4, 3, rng);
    const Matrix d = random_matrix(5, 3, rng);
    CHECK(ops::matmul_bt(c, d) == ops::matmul(c, ops::transpose(d)));
}

TEST_CASE("matmul associativity on random triples") {
    gia::Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = random_matrix(4, 6, rng);
        const Matrix b = random_matrix(6, 3, rng);
        const Matrix c = random_matrix(3, 5, rng);
        const Matrix left = ops::matmul(ops::matmul(a, b), c);
        const Matrix right = ops::matmul(a, ops::matmul(b, c));
        double scale = std::max(left.max_abs(), 1.0);
        for (std::size_t i = 0; i < left.size(); ++i) {
            CHECK(std::abs(left.data()[i] - right.data()[i]) < 1e-9 * scale);
        }
    }
}

TEST_CASE("softmax of all-zero rows is uniform") {
    const Matrix m(3, 3);
    const Matrix s = ops::softmax_rows(m, 1.0);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.data()[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("softmax closed form [0, ln 3]") {
    const Matrix m(1, 2, {0.0, std::log(3.0)});
    const Matrix s = ops::softmax_rows(m, 1.0);
    CHECK(s(0, 0) == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(s(0, 1) == doctest::Approx(0.75).epsilon(1e-13));
}

TEST_CASE("softmax rows sum to one") {
    gia::Rng rng(17);
    const Matrix m = random_matrix(4, 4, rng);
    const Matrix s = ops::softmax_rows(m, 2.0);
    for (std::size_t i = 0; i < 4; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < 4; ++j) total += s(i, j);
        CHECK(std::abs(total - 1.0) < 1e-12);
    }
}

TEST_CASE("softmax is invariant under per-row shifts") {
    gia::Rng rng(19);
    Matrix m = random_matrix(5, 6, rng);
    Matrix shifted = m;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double delta = rng.uniform(-3.0, 3.0);
        for (std::size_t j = 0; j < m.cols(); ++j) shifted(i, j) += delta;
    }
    const Matrix a = ops::softmax_rows(m, 1.5);
    const Matrix b = ops::softmax_rows(shifted, 1.5);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a.data()[i] - b.data()[i]) < 1e-12);
}

TEST_CASE("softmax survives large magnitudes") {
    const Matrix m(1, 3, {1e300, 1e300, -1e300});
    const Matrix s = ops::softmax_rows(m, 1.0);
    CHECK(s.all_finite());
    CHECK(s(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("softmax rejects non-positive divisor") {
    const Matrix m(2, 2);
    CHECK_THROWS_AS(ops::softmax_rows(m, 0.0), gia::ArgumentError);
    CHECK_THROWS_AS(ops::softmax_rows(m, -1.0), gia::ArgumentError);
}

TEST_CASE("add_row_broadcast adds a bias row") {
    const Matrix a(2, 3, {1, 2, 3, 4, 5, 6});
    const Matrix bias(1, 3, {10, 20, 30});
    const Matrix c = ops::add_row_broadcast(a, bias);
    CHECK(c == Matrix(2, 3, {11, 22, 33, 14, 25, 36}));
    CHECK_THROWS_AS(ops::add_row_broadcast(a, Matrix(1, 2)), gia::ShapeError);
}

TEST_CASE("relu clamps negatives") {
    const Matrix a(1, 4, {-2, -0.5, 0, 3});
    CHECK(ops::relu(a) == Matrix(1, 4, {0, 0, 0, 3}));
}

TEST_CASE("elementwise ops keep finite values finite") {
    gia::Rng rng(23);
    const Matrix a = random_matrix(3, 3, rng);
    const Matrix b = random_matrix(3, 3, rng);
    CHECK(ops::add(a, b).all_finite());
    CHECK(ops::sub(a, b).all_finite());
    CHECK(ops::mul(a, b).all_finite());
    CHECK(ops::scale(a, -2.5).all_finite());
    CHECK(ops::matmul(a, b).all_finite());
}

TEST_CASE("column_sums and sum_all") {
    const Matrix a(2, 2, {1, 2, 3, 4});
    CHECK(ops::column_sums(a) == Matrix(1, 2, {4, 6}));
    CHECK(ops::sum_all(a) == doctest::Approx(10.0));
}
