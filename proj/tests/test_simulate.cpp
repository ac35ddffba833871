#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "csph/errors.hpp"
#include "csph/model.hpp"
#include "csph/simulate.hpp"
#include "test_support.hpp"

using namespace csph;
using testsupport::example_model;
using testsupport::scalar_model;

TEST_CASE("seeded streams replay exactly") {
    const auto m = example_model();
    const auto a = sample_dataset(m, 1000, 123456);
    const auto b = sample_dataset(m, 1000, 123456);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x1 == b[i].x1);
        CHECK(a[i].x2 == b[i].x2);
        CHECK(a[i].tau12 == b[i].tau12);
        CHECK(a[i].k == b[i].k);
    }
    const auto c = sample_dataset(m, 1, 123457);
    CHECK(c.size() == 1);
    CHECK(c[0].x1 != a[0].x1);
}

TEST_CASE("records satisfy the construction identity bit-exactly") {
    const auto m = example_model();
    for (const auto& r : sample_dataset(m, 5000, 8)) {
        CHECK(r.x1 == m.a1 * r.tau12 + r.resid1);
        CHECK(r.x2 == m.a2 * r.tau12 + r.resid2);
        CHECK(r.tau12 >= 0.0);
        CHECK(r.resid1 >= 0.0);
        CHECK(r.resid2 >= 0.0);
        CHECK(r.k >= 0);
        CHECK(r.k < 2);
    }
}

TEST_CASE("ctmc exit time and state law") {
    SUBCASE("single-state exit is exponential") {
        const auto s = scalar_model(2.0);
        Rng rng(1);
        const std::size_t n = 1000000;
        double acc = 0.0, acc2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto [t, k] = sample_ctmc_exit(s.T, s.U, s.alpha, rng);
            CHECK(k == 0);
            acc += t;
            acc2 += t * t;
        }
        const double mean = acc / n;
        const double sd = std::sqrt(acc2 / n - mean * mean);
        CHECK(std::abs(mean - 0.5) <= 3.0 * sd / std::sqrt(static_cast<double>(n)));
    }

    SUBCASE("entry-state frequencies match the absorption probabilities") {
        const auto m = example_model();
        const Vector x = solve_linear(-m.T, Vector(m.U.col(1)));
        const double p2 = m.alpha.dot(x);
        Rng rng(99);
        const std::size_t n = 500000;
        double hits = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            hits += sample_ctmc_exit(m.T, m.U, m.alpha, rng).second == 1 ? 1.0 : 0.0;
        const double freq = hits / n;
        const double se = std::sqrt(p2 * (1.0 - p2) / n);
        CHECK(std::abs(freq - p2) <= 3.0 * se);
    }

    SUBCASE("an absorbing pre-shock row is a model error") {
        Matrix t = Matrix::Zero(2, 2);
        t(0, 0) = -1.0;
        t(0, 1) = 1.0;  // state 1 has no outgoing rate at all
        Matrix u = Matrix::Zero(2, 1);
        RowVector init(2);
        init << 1.0, 0.0;
        Rng rng(5);
        CHECK_THROWS_AS(sample_ctmc_exit(t, u, init, rng), ValidationError);
    }
}

TEST_CASE("marginal distribution passes a KS test") {
    const auto m = example_model();
    const auto records = sample_dataset(m, 100000, 31337);
    std::vector<double> xs(records.size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = records[i].x1;
    std::sort(xs.begin(), xs.end());
    double dmax = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = marginal_cdf(m, 1, xs[i]);
        const double lo = static_cast<double>(i) / xs.size();
        const double hi = static_cast<double>(i + 1) / xs.size();
        dmax = std::max({dmax, std::abs(f - lo), std::abs(f - hi)});
    }
    // 0.1% critical value sqrt(ln(2/0.001)/2)/sqrt(n).
    const double critical = 1.9495 / std::sqrt(static_cast<double>(xs.size()));
    CHECK(dmax <= critical);
}

TEST_CASE("empirical joint cdf matches on a grid") {
    const auto m = example_model();
    const auto records = sample_dataset(m, 200000, 777);
    for (double z1 : {4.0, 9.0, 14.0, 22.0, 35.0}) {
        for (double z2 : {2.0, 6.0, 10.0, 15.0, 24.0}) {
            double hits = 0.0;
            for (const auto& r : records)
                hits += (r.x1 <= z1 && r.x2 <= z2) ? 1.0 : 0.0;
            const double freq = hits / records.size();
            const double p = joint_cdf(m, z1, z2);
            const double se = std::sqrt(p * (1.0 - p) / records.size());
            CHECK(std::abs(freq - p) <= 3.0 * se + 1e-12);
        }
    }
}

TEST_CASE("sampled moments track the published example values") {
    const auto m = example_model();
    const auto records = sample_dataset(m, 200000, 2024);
    double s1 = 0, s2 = 0;
    for (const auto& r : records) {
        s1 += r.x1;
        s2 += r.x2;
    }
    // Loose 3-sigma envelopes around the exact means.
    CHECK(std::abs(s1 / records.size() - 12.8711) <=
          3.0 * std::sqrt(69.52 / records.size()));
    CHECK(std::abs(s2 / records.size() - 8.4444) <=
          3.0 * std::sqrt(30.86 / records.size()));
}
