#include "csph/master.hpp"

#include <cmath>
#include <string>

#include "csph/errors.hpp"

namespace csph {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

void check_order(int order, const char* who) {
    if (order < 0)
        throw DimensionError(std::string(who) + ": order must be nonnegative");
}

// selector_left(N,p) · e^{Q^(N,θ)·x} · (-Q^(N,θ))^{-1}-ish column factor for a
// residual component; with_resolvent toggles the tail integral.
Vector residual_column(const Matrix& q, const Vector& exit, int order, double theta,
                       double x, bool with_resolvent, const char* component) {
    const AugmentedGenerator aug = augment_generator(q, order, theta);
    Vector col = augment_exit(exit, order);
    if (with_resolvent) {
        try {
            col = solve_linear(-aug.assembled, col);
        } catch (const SingularityError&) {
            throw DomainError(std::string("master_moment: augmented generator for ") +
                              component + " is singular (order " +
                              std::to_string(order) + ", tilt " +
                              std::to_string(theta) + ")");
        }
    }
    col = mat_exp(aug.assembled * x) * col;
    return selector_left(order, q.rows()) * col;
}

}  // namespace

AugmentedGenerator augment_generator(const Matrix& m, int order, double theta) {
    if (m.rows() != m.cols())
        throw DimensionError("augment_generator: base matrix must be square");
    check_order(order, "augment_generator");
    const Eigen::Index p = m.rows();
    const Matrix diag = m - theta * Matrix::Identity(p, p);
    Matrix a = Matrix::Zero((order + 1) * p, (order + 1) * p);
    for (int b = 0; b <= order; ++b) {
        a.block(b * p, b * p, p, p) = diag;
        if (b < order) a.block(b * p, (b + 1) * p, p, p) = Matrix::Identity(p, p);
    }
    return AugmentedGenerator{std::move(a), order, theta, p};
}

RowVector augment_initial(const RowVector& alpha, int order) {
    check_order(order, "augment_initial");
    RowVector out = RowVector::Zero((order + 1) * alpha.size());
    out.head(alpha.size()) = alpha;
    return out;
}

Vector augment_exit(const Vector& q, int order) {
    check_order(order, "augment_exit");
    Vector out = Vector::Zero((order + 1) * q.size());
    out.tail(q.size()) = q;
    return out;
}

Matrix selector_down(int order, Eigen::Index p) {
    check_order(order, "selector_down");
    Matrix out = Matrix::Zero((order + 1) * p, p);
    out.bottomRows(p) = Matrix::Identity(p, p);
    return out;
}

Matrix selector_left(int order, Eigen::Index p) {
    check_order(order, "selector_left");
    Matrix out = Matrix::Zero(p, (order + 1) * p);
    out.leftCols(p) = Matrix::Identity(p, p);
    return out;
}

double sb_esscher_numerator(const CSPHModel& m, const std::array<int, 3>& n,
                            const std::array<double, 3>& theta,
                            const std::array<double, 3>& x) {
    const AugmentedGenerator taug = augment_generator(m.T, n[0], theta[0]);
    const RowVector shock_row = augment_initial(m.alpha, n[0]) *
                                mat_exp(taug.assembled * x[0]) *
                                selector_down(n[0], m.num_pre());
    const Vector c1 =
        residual_column(m.Q1, m.exit_rates(1), n[1], theta[1], x[1], false, "residual 1");
    const Vector c2 =
        residual_column(m.Q2, m.exit_rates(2), n[2], theta[2], x[2], false, "residual 2");
    const double scale = factorial(n[0]) * factorial(n[1]) * factorial(n[2]);
    const RowVector row = shock_row * coupling_matrix(m).P;
    return scale * row.dot(kron_vec(c1, c2));
}

double master_moment(const CSPHModel& m, const MasterQuery& q) {
    for (double y : q.y)
        if (y < 0.0) throw DomainError("master_moment: tail thresholds must be >= 0");
    for (int n : q.n)
        if (n < 0) throw DomainError("master_moment: powers must be >= 0");

    const AugmentedGenerator taug = augment_generator(m.T, q.n[0], q.theta[0]);
    Matrix shock_tail;  // (-T^(N,θ))^{-1} · selector_down · P
    try {
        shock_tail = solve_linear(-taug.assembled,
                                  selector_down(q.n[0], m.num_pre()) *
                                      coupling_matrix(m).P);
    } catch (const SingularityError&) {
        throw DomainError(
            "master_moment: augmented generator for the shock component is "
            "singular (order " + std::to_string(q.n[0]) + ", tilt " +
            std::to_string(q.theta[0]) + ")");
    }
    const RowVector row = augment_initial(m.alpha, q.n[0]) *
                          mat_exp(taug.assembled * q.y[0]) * shock_tail;
    const Vector c1 = residual_column(m.Q1, m.exit_rates(1), q.n[1], q.theta[1],
                                      q.y[1], true, "residual 1");
    const Vector c2 = residual_column(m.Q2, m.exit_rates(2), q.n[2], q.theta[2],
                                      q.y[2], true, "residual 2");
    const double scale = factorial(q.n[0]) * factorial(q.n[1]) * factorial(q.n[2]);
    return scale * row.dot(kron_vec(c1, c2));
}

double sb_esscher_density(const CSPHModel& m, const std::array<int, 3>& n,
                          const std::array<double, 3>& theta,
                          const std::array<double, 3>& x) {
    MasterQuery q;
    q.n = n;
    q.theta = theta;
    const double denom = master_moment(m, q);
    if (!(denom > 0.0) || !std::isfinite(denom)) {
        throw DomainError("sb_esscher_density: normalizing moment is " +
                          std::to_string(denom));
    }
    return sb_esscher_numerator(m, n, theta, x) / denom;
}

}  // namespace csph
