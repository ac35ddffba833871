#include "csph/conditional.hpp"

#include <cmath>
#include <string>

#include "csph/errors.hpp"

namespace csph {

namespace {

// e_k^T (-Q)^{-n} q — the n-th factorial-moment building block of PH(e_k, Q).
Vector ph_power_moments(const Matrix& q, const Vector& exit, int power) {
    Vector v = exit;
    for (int i = 0; i < power; ++i) v = solve_linear(-q, v);
    return v;
}

void check_state(const CSPHModel& m, Eigen::Index k, const char* who) {
    if (k < 0 || k >= m.num_post())
        throw DimensionError(std::string(who) + ": state index out of range");
}

}  // namespace

ConditionalWeights entry_weights(const CSPHModel& m, double t) {
    if (t < 0.0) throw DomainError("entry_weights: t must be >= 0");
    RowVector w = m.alpha * mat_exp(m.T * t) * m.U;
    const double total = w.sum();
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw DomainError("entry_weights: shock density underflows at t = " +
                          std::to_string(t));
    }
    return ConditionalWeights{t, (w / total).transpose()};
}

double cond_mean(const CSPHModel& m, int margin, double t) {
    const Vector w = entry_weights(m, t).weights;
    const Vector means =
        ph_power_moments(m.post_generator(margin), m.exit_rates(margin), 2);
    return w.dot(means);
}

double cond_var(const CSPHModel& m, int margin, double t) {
    const Vector w = entry_weights(m, t).weights;
    const Matrix& q = m.post_generator(margin);
    const Vector exit = m.exit_rates(margin);
    const Vector means = ph_power_moments(q, exit, 2);
    const Vector second = 2.0 * ph_power_moments(q, exit, 3);
    const double mean = w.dot(means);
    return w.dot(second) - mean * mean;
}

double cond_cross_moment(const CSPHModel& m, double t) {
    const Vector w = entry_weights(m, t).weights;
    const Vector m1 = ph_power_moments(m.Q1, m.exit_rates(1), 2);
    const Vector m2 = ph_power_moments(m.Q2, m.exit_rates(2), 2);
    return (w.array() * m1.array() * m2.array()).sum();
}

double cond_pearson(const CSPHModel& m, double t) {
    const double v1 = cond_var(m, 1, t);
    const double v2 = cond_var(m, 2, t);
    if (!(v1 > 0.0) || !(v2 > 0.0)) {
        throw DomainError("cond_pearson: degenerate conditional variance at t = " +
                          std::to_string(t));
    }
    const double cov =
        cond_cross_moment(m, t) - cond_mean(m, 1, t) * cond_mean(m, 2, t);
    return cov / std::sqrt(v1 * v2);
}

double kendall_coefficient(const CSPHModel& m, int margin, Eigen::Index k,
                           Eigen::Index mstate) {
    check_state(m, k, "kendall_coefficient");
    check_state(m, mstate, "kendall_coefficient");
    const Matrix& q = m.post_generator(margin);
    const Vector exit = m.exit_rates(margin);
    const auto p1 = m.num_post();
    RowVector ekm = RowVector::Zero(p1 * p1);
    ekm(k * p1 + mstate) = 1.0;
    const Vector sol = solve_linear(-kron_sum(q, q), kron_vec(Vector::Ones(p1), exit));
    return 1.0 - ekm.dot(sol);
}

double cond_kendall(const CSPHModel& m, double t) {
    const Vector w = entry_weights(m, t).weights;
    const auto p1 = m.num_post();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < p1; ++k)
        for (Eigen::Index l = 0; l < p1; ++l)
            acc += w(k) * w(l) * kendall_coefficient(m, 1, k, l) *
                   kendall_coefficient(m, 2, k, l);
    return 4.0 * acc - 1.0;
}

double cond_spearman(const CSPHModel& m, double t) {
    const Vector w = entry_weights(m, t).weights;
    const auto p1 = m.num_post();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < p1; ++k)
        for (Eigen::Index l = 0; l < p1; ++l)
            for (Eigen::Index n = 0; n < p1; ++n)
                acc += w(k) * w(l) * w(n) * kendall_coefficient(m, 1, k, l) *
                       kendall_coefficient(m, 2, k, n);
    return 12.0 * acc - 3.0;
}

}  // namespace csph
