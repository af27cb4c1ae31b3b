#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "garble/linalg.hpp"

using garble::cholesky_psd;
using garble::FactorizationError;
using garble::Matrix;
using garble::solve_spd;
using garble::Vector;

namespace {
Matrix make2x2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 0) = c;
    m(1, 1) = d;
    return m;
}
}  // namespace

TEST_CASE("cholesky of identity is identity") {
    const Matrix l = cholesky_psd(Matrix::identity(3));
    REQUIRE(l == Matrix::identity(3));
}

TEST_CASE("cholesky reproduces the input") {
    Matrix a = make2x2(4.0, -1.0, -1.0, 2.0);
    const Matrix l = cholesky_psd(a);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            double v = 0.0;
            for (std::size_t k = 0; k < 2; ++k) v += l(i, k) * l(j, k);
            REQUIRE(v == Catch::Approx(a(i, j)).margin(1e-12));
        }
}

TEST_CASE("cholesky accepts semidefinite matrices") {
    SECTION("zero matrix") {
        Matrix z(1, 1);
        const Matrix l = cholesky_psd(z);
        REQUIRE(l(0, 0) == 0.0);
    }
    SECTION("rank-one 2x2") {
        Matrix a = make2x2(1.0, 1.0, 1.0, 1.0);
        const Matrix l = cholesky_psd(a);
        REQUIRE(l(0, 0) == 1.0);
        REQUIRE(l(1, 0) == 1.0);
        REQUIRE(l(1, 1) == 0.0);
    }
}

TEST_CASE("cholesky rejects indefinite matrices and names the column") {
    Matrix a = make2x2(1.0, 2.0, 2.0, 1.0);  // eigenvalues 3, -1
    try {
        cholesky_psd(a);
        FAIL("expected FactorizationError");
    } catch (const FactorizationError& e) {
        REQUIRE(e.column == 1);
    }
}

TEST_CASE("cholesky rejects asymmetric input") {
    Matrix a = make2x2(1.0, 0.5, 0.0, 1.0);
    REQUIRE_THROWS_AS(cholesky_psd(a), FactorizationError);
}

TEST_CASE("solve_spd solves a known system") {
    Matrix a = make2x2(4.0, 1.0, 1.0, 3.0);
    const Vector x = solve_spd(a, {1.0, 2.0});
    REQUIRE(4.0 * x[0] + 1.0 * x[1] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(1.0 * x[0] + 3.0 * x[1] == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("solve_spd reports the singular column") {
    Matrix a = make2x2(1.0, 1.0, 1.0, 1.0);
    try {
        solve_spd(a, {1.0, 1.0});
        FAIL("expected FactorizationError");
    } catch (const FactorizationError& e) {
        REQUIRE(e.column == 1);
    }
}
