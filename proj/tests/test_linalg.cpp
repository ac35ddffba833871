#include <doctest.h>

#include <cmath>
#include <random>

#include "csph/errors.hpp"
#include "csph/linalg.hpp"
#include "test_support.hpp"

using namespace csph;
using testsupport::expm_series;
using testsupport::kron_by_index;
using testsupport::random_subintensity;

TEST_CASE("mat_exp basic identities") {
    CHECK(mat_exp(Matrix::Zero(2, 2)).isApprox(Matrix::Identity(2, 2), 1e-15));

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = -1.0;
    d(1, 1) = -2.0;
    const Matrix e = mat_exp(d);
    CHECK(e(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(e(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(e(0, 1) == 0.0);

    for (int n = 1; n <= 8; ++n) {
        CHECK(mat_exp(Matrix::Zero(n, n)).isApprox(Matrix::Identity(n, n), 1e-15));
    }
}

TEST_CASE("mat_exp matches the power-series oracle on the example generator") {
    const auto m = testsupport::example_model();
    const Vector via_pade = mat_exp(m.T) * Vector::Ones(3);
    const Vector via_series = expm_series(m.T) * Vector::Ones(3);
    CHECK((via_pade - via_series).cwiseAbs().maxCoeff() <= 1e-12);

    // Larger norms exercise the squaring phase.
    std::mt19937_64 gen(7);
    for (int rep = 0; rep < 10; ++rep) {
        const Matrix a = random_subintensity(gen, 4, 3.0);
        CHECK((mat_exp(a) - expm_series(a)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("mat_exp keeps the survival interpretation of subintensities") {
    std::mt19937_64 gen(11);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix a = random_subintensity(gen, 3);
        for (double t : {0.0, 0.3, 1.7, 9.0}) {
            const Vector surv = mat_exp(a * t) * Vector::Ones(3);
            for (Eigen::Index i = 0; i < surv.size(); ++i) {
                CHECK(surv(i) >= -1e-10);
                CHECK(surv(i) <= 1.0 + 1e-10);
            }
        }
    }
}

TEST_CASE("mat_exp rejects bad input") {
    CHECK_THROWS_AS(mat_exp(Matrix::Zero(2, 3)), DimensionError);
    Matrix nan = Matrix::Zero(2, 2);
    nan(0, 0) = std::nan("");
    CHECK_THROWS_AS(mat_exp(nan), NumericError);
    CHECK_THROWS_AS(mat_exp(Matrix::Constant(2, 2, 1e300)), NumericError);
}

TEST_CASE("kron_product identities and index oracle") {
    CHECK(kron_product(Matrix::Identity(2, 2), Matrix::Identity(3, 3))
              .isApprox(Matrix::Identity(6, 6)));

    Matrix col(2, 1), scalar(1, 1);
    col << 1.0, 2.0;
    scalar << 3.0;
    Matrix expect(2, 1);
    expect << 3.0, 6.0;
    CHECK(kron_product(col, scalar).isApprox(expect));

    const auto m = testsupport::example_model();
    CHECK(kron_product(m.Q1, m.Q2).isApprox(kron_by_index(m.Q1, m.Q2), 1e-15));

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Matrix a(2, 3), b(3, 2);
    for (int rep = 0; rep < 5; ++rep) {
        for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = u(gen);
        for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = u(gen);
        CHECK(kron_product(a, b).isApprox(kron_by_index(a, b), 1e-14));
    }
}

TEST_CASE("kron_product mixed-product property") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        Matrix a(2, 2), b(3, 3), c(2, 2), d(3, 3);
        for (Matrix* mp : {&a, &c})
            for (Eigen::Index i = 0; i < mp->size(); ++i) (*mp)(i) = u(gen);
        for (Matrix* mp : {&b, &d})
            for (Eigen::Index i = 0; i < mp->size(); ++i) (*mp)(i) = u(gen);
        const Matrix lhs = kron_product(a, b) * kron_product(c, d);
        const Matrix rhs = kron_product(Matrix(a * c), Matrix(b * d));
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("kron_sum") {
    CHECK(kron_sum(Matrix::Zero(1, 1), Matrix::Zero(1, 1))(0, 0) == 0.0);
    CHECK(kron_sum(Matrix::Constant(1, 1, -1.0), Matrix::Constant(1, 1, -2.0))(0, 0) ==
          doctest::Approx(-3.0));
    CHECK_THROWS_AS(kron_sum(Matrix::Zero(2, 3), Matrix::Zero(2, 2)), DimensionError);

    // e^{(A⊕B)r} = e^{Ar} ⊗ e^{Br}
    std::mt19937_64 gen(9);
    const Matrix a = random_subintensity(gen, 2);
    const Matrix b = random_subintensity(gen, 2);
    const double r = 0.7;
    const Matrix lhs = mat_exp(kron_sum(a, b) * r);
    const Matrix rhs = kron_product(mat_exp(a * r), mat_exp(b * r));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("van_loan_integral") {
    const auto m = testsupport::example_model();

    SUBCASE("u = 0 gives the empty integral") {
        const Matrix v = van_loan_integral(m.T, m.U, m.Q1, 0.0);
        CHECK(v.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("scalar closed form") {
        const Matrix a = Matrix::Constant(1, 1, -1.0);
        const Matrix b = Matrix::Constant(1, 1, 1.0);
        // ∫₀¹ e^{-t} e^{-(1-t)} dt = e^{-1}
        CHECK(van_loan_integral(a, b, a, 1.0)(0, 0) ==
              doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
    }

    SUBCASE("quadrature oracle on the example blocks") {
        const Matrix p = coupling_matrix(m).P;
        const Matrix c = kron_sum(m.a1 * m.Q1, m.a2 * m.Q2);
        const Matrix v = van_loan_integral(m.T, p, c, 2.0);
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            for (Eigen::Index j = 0; j < v.cols(); ++j) {
                const double q = testsupport::adaptive_simpson(
                    [&](double t) {
                        return (mat_exp(m.T * t) * p * mat_exp(c * (2.0 - t)))(i, j);
                    },
                    0.0, 2.0, 1e-12);
                CHECK(std::abs(v(i, j) - q) <= 1e-8);
            }
        }
    }

    SUBCASE("random instances against quadrature") {
        std::mt19937_64 gen(17);
        for (int rep = 0; rep < 20; ++rep) {
            const Matrix a = random_subintensity(gen, 2);
            const Matrix c = random_subintensity(gen, 2);
            std::uniform_real_distribution<double> u(0.1, 2.0);
            Matrix b(2, 2);
            for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = u(gen);
            const double horizon = u(gen);
            const Matrix v = van_loan_integral(a, b, c, horizon);
            const double q = testsupport::adaptive_simpson(
                [&](double t) {
                    return (mat_exp(a * t) * b * mat_exp(c * (horizon - t)))(0, 1);
                },
                0.0, horizon, 1e-12);
            CHECK(std::abs(v(0, 1) - q) <= 1e-8);
        }
    }

    SUBCASE("dimension checks") {
        CHECK_THROWS_AS(van_loan_integral(m.T, Matrix::Zero(2, 2), m.Q1, 1.0),
                        DimensionError);
        CHECK_THROWS_AS(van_loan_integral(m.T, m.U, m.Q1, -0.5), DomainError);
    }
}

TEST_CASE("solve_linear") {
    Matrix b(2, 2);
    b << 1.0, 2.0, 3.0, 4.0;
    CHECK(solve_linear(Matrix::Identity(2, 2), b).isApprox(b));

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 4.0;
    Vector rhs(2);
    rhs << 2.0, 4.0;
    CHECK(solve_linear(d, rhs).isApprox(Vector::Ones(2)));

    const auto m = testsupport::example_model();
    const Vector u1 = m.U.rowwise().sum();
    const Vector x = solve_linear(-m.T, u1);
    const double resid = ((-m.T) * x - u1).cwiseAbs().maxCoeff();
    CHECK(resid <= 1e-10 * (1.0 + u1.cwiseAbs().maxCoeff()));

    std::mt19937_64 gen(23);
    for (int rep = 0; rep < 10; ++rep) {
        const Matrix a = random_subintensity(gen, 4);
        Matrix rhs2(4, 2);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (Eigen::Index i = 0; i < rhs2.size(); ++i) rhs2(i) = u(gen);
        const Matrix sol = solve_linear(a, rhs2);
        CHECK((a * sol - rhs2).cwiseAbs().maxCoeff() <=
              1e-10 * (1.0 + rhs2.cwiseAbs().maxCoeff()));
    }

    CHECK_THROWS_AS(solve_linear(Matrix::Zero(2, 2), b), SingularityError);
    Matrix rank1(2, 2);
    rank1 << 1.0, 2.0, 2.0, 4.0;
    CHECK_THROWS_AS(solve_linear(rank1, b), SingularityError);
    CHECK_THROWS_AS(solve_linear(Matrix::Zero(2, 3), b), DimensionError);
}

TEST_CASE("spectral_abscissa") {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = -1.0;
    d(1, 1) = -3.0;
    CHECK(spectral_abscissa(d) == doctest::Approx(-1.0).epsilon(1e-12));

    Matrix rot(2, 2);
    rot << 0.0, 1.0, -1.0, 0.0;
    CHECK(std::abs(spectral_abscissa(rot)) <= 1e-12);

    // [[-1/2,1/4],[1/4,-1/2]] has eigenvalues -1/4 and -3/4.
    const auto m = testsupport::example_model();
    CHECK(spectral_abscissa(m.Q2) == doctest::Approx(-0.25).epsilon(1e-10));
}
