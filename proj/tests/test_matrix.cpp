#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "beltree/matrix.hpp"
#include "helpers.hpp"

using namespace beltree;
using beltree::testing::random_matrix;
using beltree::testing::random_psd;

namespace {

bool approx_equal(const Matrix& a, const Matrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    return (a - b).cwiseAbs().maxCoeff() <= tol * scale;
}

// The four Penrose conditions, checked numerically.
bool penrose_ok(const Matrix& a, const Matrix& pinv, double tol = 1e-8) {
    return approx_equal(a * pinv * a, a, tol) && approx_equal(pinv * a * pinv, pinv, tol) &&
           approx_equal((a * pinv).transpose(), a * pinv, tol) &&
           approx_equal((pinv * a).transpose(), pinv * a, tol);
}

}  // namespace

TEST_CASE("pseudo_inverse identity and zero") {
    CHECK(approx_equal(pseudo_inverse(Matrix::Identity(3, 3)), Matrix::Identity(3, 3), 1e-12));
    CHECK(approx_equal(pseudo_inverse(Matrix::Zero(2, 2)), Matrix::Zero(2, 2), 1e-12));
}

TEST_CASE("pseudo_inverse scalar") {
    Matrix m(1, 1);
    m << 571;
    CHECK(pseudo_inverse(m)(0, 0) == doctest::Approx(0.00175131348511).epsilon(1e-10));
}

TEST_CASE("pseudo_inverse rejects non-finite input") {
    Matrix m(2, 2);
    m << 1, 2, 3, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(pseudo_inverse(m), InvalidMatrixError);
}

TEST_CASE("Penrose conditions on random rank-deficient 4x4 matrices") {
    std::mt19937 rng(20240501);
    std::uniform_int_distribution<Index> rank_dist(1, 3);
    for (int trial = 0; trial < 50; ++trial) {
        const Index rank = rank_dist(rng);
        Matrix a = random_matrix(rng, 4, rank) * random_matrix(rng, rank, 4);
        Matrix p = pseudo_inverse(a);
        CHECK(penrose_ok(a, p));
    }
}

TEST_CASE("Penrose conditions on rectangular matrices of all ranks") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        std::uniform_int_distribution<Index> dim_dist(1, 5);
        const Index rows = dim_dist(rng), cols = dim_dist(rng);
        std::uniform_int_distribution<Index> rank_dist(1, std::min(rows, cols));
        const Index rank = rank_dist(rng);
        Matrix a = random_matrix(rng, rows, rank) * random_matrix(rng, rank, cols);
        CHECK(penrose_ok(a, pseudo_inverse(a)));
    }
}

TEST_CASE("pseudo_inverse is an involution") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix a = random_matrix(rng, 3, 4);
        CHECK(approx_equal(pseudo_inverse(pseudo_inverse(a)), a, 1e-8));
    }
}

TEST_CASE("psd_factor basic cases") {
    CHECK(approx_equal(psd_factor(Matrix::Identity(2, 2)), Matrix::Identity(2, 2), 1e-12));

    Matrix d(2, 2);
    d << 4, 0, 0, 0;
    Matrix expected(2, 2);
    expected << 2, 0, 0, 0;
    CHECK(approx_equal(psd_factor(d), expected, 1e-12));

    Matrix v(2, 2);
    v << 500.3, 29.2, 29.2, 10.1;
    Matrix a = psd_factor(v);
    CHECK(a(0, 0) == doctest::Approx(22.367386973).epsilon(1e-9));  // sqrt(500.3)
    CHECK(a(0, 1) == 0.0);
    CHECK(approx_equal(a * a.transpose(), v, 1e-10));
}

TEST_CASE("psd_factor handles random PSD matrices including rank deficiency") {
    std::mt19937 rng(20240502);
    std::uniform_int_distribution<Index> dim_dist(1, 6);
    for (int trial = 0; trial < 60; ++trial) {
        const Index n = dim_dist(rng);
        std::uniform_int_distribution<Index> rank_dist(0, n);
        Matrix v = random_psd(rng, n, rank_dist(rng));
        Matrix a = psd_factor(v);
        // lower triangular
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) CHECK(a(i, j) == 0.0);
        }
        const double scale = std::max(1.0, v.norm());
        CHECK((a * a.transpose() - v).norm() <= 1e-8 * scale);
    }
}

TEST_CASE("psd_factor rejects indefinite input") {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    CHECK_THROWS_AS(psd_factor(m), NotPsdError);
}

TEST_CASE("psd_factor clamps tiny negative eigenvalues") {
    Matrix v(2, 2);
    v << 1, 1, 1, 1;
    v(1, 1) -= 1e-14;  // slightly indefinite from rounding
    Matrix a = psd_factor(v);
    CHECK((a * a.transpose() - symmetrize(v)).norm() <= 1e-8);
}

TEST_CASE("symmetrize") {
    Matrix m(2, 2);
    m << 1, 2, 0, 1;
    Matrix expected(2, 2);
    expected << 1, 1, 1, 1;
    CHECK(approx_equal(symmetrize(m), expected, 1e-15));

    Matrix sym(2, 2);
    sym << 3, 1, 1, 2;
    CHECK(approx_equal(symmetrize(sym), sym, 1e-15));

    CHECK_THROWS_AS(symmetrize(Matrix::Zero(2, 3)), ShapeError);
}

TEST_CASE("is_psd") {
    CHECK(is_psd(Matrix::Identity(3, 3)));
    CHECK(is_psd(Matrix::Zero(2, 2)));
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    CHECK_FALSE(is_psd(m));
    Matrix asym(2, 2);
    asym << 1, 1, 0, 1;
    CHECK_FALSE(is_psd(asym));
}
