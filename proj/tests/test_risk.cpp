#include <doctest.h>

#include <cmath>

#include "csph/errors.hpp"
#include "csph/risk.hpp"
#include "csph/simulate.hpp"
#include "test_support.hpp"

using namespace csph;
using testsupport::example_model;
using testsupport::scalar_model;

TEST_CASE("moment_set reproduces the published example values") {
    const auto m = example_model();
    const MomentSet s = moment_set(m);
    CHECK(std::abs(s.e_x1 - 12.87) <= 0.01);
    CHECK(std::abs(s.e_x2 - 8.44) <= 0.01);
    CHECK(std::abs(s.var1() - 69.51) <= 0.01);
    CHECK(std::abs(s.var2() - 30.85) <= 0.01);
    CHECK(std::abs(s.e_tau - 4.44) <= 0.01);
}

TEST_CASE("moment_set closed forms on the scalar model") {
    const auto s = moment_set(scalar_model());
    CHECK(s.e_x1 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.e_x2 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.var1() == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(s.var2() == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(s.e_x1x2 == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("moment_set against simulated batch means") {
    const auto m = example_model();
    const auto records = sample_dataset(m, 1000000, 77123);
    const int batches = 100;
    const std::size_t per = records.size() / batches;
    const MomentSet s = moment_set(m);

    const auto check_stat = [&](auto stat, double exact) {
        std::vector<double> values(batches);
        for (int b = 0; b < batches; ++b) {
            double acc = 0.0;
            for (std::size_t r = b * per; r < (b + 1) * per; ++r)
                acc += stat(records[r]);
            values[b] = acc / per;
        }
        const auto [mean, se] = testsupport::mean_se(values);
        INFO("exact ", exact, " sim ", mean, " se ", se);
        CHECK(std::abs(exact - mean) <= 3.0 * se);
    };
    check_stat([](const SampleRecord& r) { return r.x1; }, s.e_x1);
    check_stat([](const SampleRecord& r) { return r.x2; }, s.e_x2);
    check_stat([](const SampleRecord& r) { return r.x1 * r.x1; }, s.e_x1_sq);
    check_stat([](const SampleRecord& r) { return r.x2 * r.x2; }, s.e_x2_sq);
    check_stat([](const SampleRecord& r) { return r.x1 * r.x2; }, s.e_x1x2);
    check_stat([](const SampleRecord& r) { return r.tau12; }, s.e_tau);
}

TEST_CASE("pearson") {
    CHECK(std::abs(pearson(example_model()) - 0.6291) <= 0.0005);
    CHECK(pearson(scalar_model()) == doctest::Approx(0.5).epsilon(1e-11));

    // Vanishing shock scalings kill the only dependence channel when there is
    // a single post-shock state.
    const auto tiny = scalar_model(1.0, 1.0, 1.0, 1e-6, 1e-6);
    CHECK(std::abs(pearson(tiny)) <= 1e-6);
}

TEST_CASE("entropic risk") {
    SUBCASE("scalar closed form log(1/4)") {
        const auto s = scalar_model();
        CHECK(entropic_risk(s, 1, 1.0, 0.0) ==
              doctest::Approx(std::log(0.25)).epsilon(1e-12));
    }

    SUBCASE("unconditional case equals the mgf identity") {
        const auto m = example_model();
        for (double vt : {0.25, 0.5, 1.0}) {
            CHECK(entropic_risk(m, 1, vt, 0.0) ==
                  doctest::Approx(std::log(joint_mgf(m, -vt, 0.0)) / vt)
                      .epsilon(1e-12));
            CHECK(entropic_risk(m, 2, vt, 0.0) ==
                  doctest::Approx(std::log(joint_mgf(m, 0.0, -vt)) / vt)
                      .epsilon(1e-12));
        }
    }

    SUBCASE("a tighter shock condition lowers E[e^{-vartheta X}], so the value falls") {
        // With losses entering as e^{-vartheta x}, conditioning on a later
        // shock makes X stochastically larger and the measure decreases along
        // the threshold grid.
        const auto m = example_model();
        double prev = std::numeric_limits<double>::infinity();
        for (double a : {0.0, 1.5, 3.0, 4.5, 6.0, 7.5}) {
            const double v = entropic_risk(m, 1, 0.5, a);
            CHECK(v < prev);
            prev = v;
        }
    }

    SUBCASE("argument checks") {
        const auto m = example_model();
        CHECK_THROWS_AS(entropic_risk(m, 1, 0.0, 0.0), DomainError);
        CHECK_THROWS_AS(entropic_risk(m, 1, 0.5, -1.0), DomainError);
    }
}

TEST_CASE("value_at_risk") {
    const auto m = example_model();

    SUBCASE("quantiles of both margins") {
        // Computed independently from the marginal PH representation
        // (root-finding on the cdf at 40-digit precision).
        CHECK(std::abs(value_at_risk(m, 1, 0.95) - 28.89298) <= 1e-4);
        CHECK(std::abs(value_at_risk(m, 1, 0.975) - 33.94382) <= 1e-4);
        CHECK(std::abs(value_at_risk(m, 1, 0.99) - 40.59457) <= 1e-4);
        CHECK(std::abs(value_at_risk(m, 2, 0.95) - 19.13649) <= 1e-4);
        CHECK(std::abs(value_at_risk(m, 2, 0.975) - 22.31468) <= 1e-4);
        CHECK(std::abs(value_at_risk(m, 2, 0.99) - 26.40800) <= 1e-4);
    }

    SUBCASE("root contract and monotonicity") {
        double prev = 0.0;
        for (double level : {0.5, 0.8, 0.95, 0.99}) {
            const double v = value_at_risk(m, 1, level);
            CHECK(v >= prev);
            prev = v;
            const double back = marginal_cdf(m, 1, v);
            CHECK(back >= level);
            CHECK(back <= level + 1e-8);
        }
    }

    SUBCASE("level validation") {
        CHECK_THROWS_AS(value_at_risk(m, 1, 0.0), DomainError);
        CHECK_THROWS_AS(value_at_risk(m, 1, 1.0), DomainError);
    }
}

TEST_CASE("cvar_cs") {
    const auto m = example_model();
    const MomentSet s = moment_set(m);

    CHECK(cvar_cs(m, 1, 0.0) == doctest::Approx(s.e_x1).epsilon(1e-11));
    CHECK(cvar_cs(m, 2, 0.0) == doctest::Approx(s.e_x2).epsilon(1e-11));

    SUBCASE("memoryless scalar model gives a + 2") {
        const auto sc = scalar_model();
        for (double a : {0.0, 0.7, 3.0, 6.5}) {
            CHECK(cvar_cs(sc, 1, a) == doctest::Approx(a + 2.0).epsilon(1e-11));
            CHECK(cvar_cs(sc, 2, a) == doctest::Approx(a + 2.0).epsilon(1e-11));
        }
    }

    SUBCASE("increasing in the threshold and at least the scaled threshold") {
        for (int margin : {1, 2}) {
            double prev = 0.0;
            for (double a : {0.0, 2.0, 4.0, 6.0, 8.0}) {
                const double v = cvar_cs(m, margin, a);
                CHECK(v > prev);
                CHECK(v >= m.scaling(margin) * a);
                prev = v;
            }
        }
    }

    SUBCASE("conditional simulation cross-check") {
        const double a = 3.0;
        const auto records = sample_dataset(m, 400000, 5150);
        std::vector<double> kept1, kept2;
        for (const auto& r : records) {
            if (r.tau12 > a) {
                kept1.push_back(r.x1);
                kept2.push_back(r.x2);
            }
        }
        REQUIRE(kept1.size() > 100000);
        const auto [m1, se1] = testsupport::mean_se(kept1);
        const auto [m2, se2] = testsupport::mean_se(kept2);
        CHECK(std::abs(cvar_cs(m, 1, a) - m1) <= 3.0 * se1);
        CHECK(std::abs(cvar_cs(m, 2, a) - m2) <= 3.0 * se2);
    }
}

TEST_CASE("mtce_cs and mtcov_cs") {
    const auto m = example_model();
    const MomentSet s = moment_set(m);

    CHECK(mtce_cs(m, 0.0) == doctest::Approx(s.e_x1x2).epsilon(1e-11));
    CHECK(mtce_cs(scalar_model(), 0.0) == doctest::Approx(5.0).epsilon(1e-11));
    CHECK(mtcov_cs(scalar_model(), 0.0) == doctest::Approx(1.0).epsilon(1e-10));

    // Unconditional identity against the correlation route.
    CHECK(mtcov_cs(m, 0.0) ==
          doctest::Approx(pearson(m) * std::sqrt(s.var1() * s.var2())).epsilon(1e-10));
    CHECK(std::abs(mtcov_cs(m, 0.0) - (s.e_x1x2 - s.e_x1 * s.e_x2)) <= 1e-10);

    double prev_mtce = 0.0;
    double prev_mtcov = std::numeric_limits<double>::infinity();
    for (double a : {0.0, 2.0, 4.0, 6.0, 8.0}) {
        const double e = mtce_cs(m, a);
        const double c = mtcov_cs(m, a);
        CHECK(e > prev_mtce);
        CHECK(c < prev_mtcov);
        prev_mtce = e;
        prev_mtcov = c;
    }
}

TEST_CASE("regular_variation_index") {
    SUBCASE("single-phase margin") {
        const auto s = scalar_model(2.5, 0.9, 0.9);
        // Slowest decay wins: min(lambda/a1, mu).
        CHECK(regular_variation_index(s, 1) == doctest::Approx(0.9).epsilon(1e-10));
    }

    SUBCASE("block-triangular spectrum") {
        const auto m = example_model();
        const double t_absc = spectral_abscissa(m.T);
        CHECK(regular_variation_index(m, 1) ==
              doctest::Approx(-std::max(t_absc / m.a1, spectral_abscissa(m.Q1)))
                  .epsilon(1e-10));
        CHECK(regular_variation_index(m, 2) == doctest::Approx(0.25).epsilon(1e-10));
    }

    SUBCASE("power iteration oracle on the resolvent of margin 2") {
        const auto m = example_model();
        const Matrix g2 = marginal_generator(m, 2);
        Vector v = Vector::Ones(g2.rows()).normalized();
        double lambda_max = 0.0;
        for (int it = 0; it < 3000; ++it) {
            const Vector next = solve_linear(-g2, v);
            lambda_max = next.norm();
            v = next / lambda_max;
        }
        CHECK(regular_variation_index(m, 2) ==
              doctest::Approx(1.0 / lambda_max).epsilon(1e-8));
    }
}

TEST_CASE("risk report aggregation") {
    const auto m = example_model();
    const std::vector<double> levels{0.95, 0.99};
    const std::vector<double> a_grid{0.0, 2.0, 4.0};
    const std::vector<double> varthetas{0.5};
    const RiskReport r = build_risk_report(m, levels, a_grid, varthetas);

    CHECK(r.pearson >= -1.0);
    CHECK(r.pearson <= 1.0);
    CHECK(r.var_at_risk.at(0.95).first < r.var_at_risk.at(0.99).first);
    CHECK(r.cvar_cs.size() == 3);
    CHECK(r.erm.size() == 1);
    CHECK(r.erm[0].size() == 3);
    CHECK(std::isfinite(r.mtcov_cs[2]));
    CHECK(r.tail_index.second == doctest::Approx(0.25).epsilon(1e-9));

    const auto grid = default_a_grid(m, 50);
    CHECK(grid.size() == 50);
    CHECK(grid.front() == 0.0);
    // The last point sits at the shock-time 0.99 quantile.
    CHECK(std::abs(shock_survival(m, grid.back()) - 0.01) <= 1e-6);
}
