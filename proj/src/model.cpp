#include "csph/model.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "csph/errors.hpp"

namespace csph {

namespace {

constexpr double kProbTol = 1e-12;
constexpr double kRowSumTol = 1e-10;

void check_subintensity(const Matrix& q, const char* name, std::ostringstream& bad,
                        bool require_nonpos_rowsum) {
    if (q.rows() != q.cols()) {
        bad << name << " is not square (" << q.rows() << "x" << q.cols() << "); ";
        return;
    }
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        for (Eigen::Index j = 0; j < q.cols(); ++j) {
            if (i == j && q(i, j) > 0.0)
                bad << name << "(" << i << "," << i << ") = " << q(i, i)
                    << " must be <= 0; ";
            if (i != j && q(i, j) < 0.0)
                bad << name << "(" << i << "," << j << ") = " << q(i, j)
                    << " must be >= 0; ";
        }
        if (require_nonpos_rowsum) {
            const double rs = q.row(i).sum();
            if (rs > kRowSumTol * (1.0 + norm_inf(q)))
                bad << name << " row " << i << " sums to " << rs << " > 0; ";
        }
    }
    if (!q.allFinite()) bad << name << " has non-finite entries; ";
}

void check_probability_vector(const RowVector& v, const char* name,
                              std::ostringstream& bad) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!(v(i) >= 0.0))
            bad << name << "(" << i << ") = " << v(i) << " must be >= 0; ";
    }
    const double s = v.sum();
    if (std::abs(s - 1.0) > kProbTol)
        bad << name << " sums to " << s << ", off by " << std::abs(s - 1.0) << "; ";
}

void check_index(const CSPHModel& m, Eigen::Index k, const char* who) {
    if (k < 0 || k >= m.num_post()) {
        throw DimensionError(std::string(who) + ": post-shock state " +
                             std::to_string(k) + " out of range [0, " +
                             std::to_string(m.num_post()) + ")");
    }
}

void check_margin(int margin, const char* who) {
    if (margin != 1 && margin != 2)
        throw DimensionError(std::string(who) + ": margin must be 1 or 2");
}

RowVector padded_initial(const CSPHModel& m) {
    RowVector a0 = RowVector::Zero(m.num_pre() + m.num_post());
    a0.head(m.num_pre()) = m.alpha;
    return a0;
}

// Resolvent row alpha·(-M - sI)^{-1} shared by the transform routines.
RowVector resolvent_row(const RowVector& init, const Matrix& gen, double s,
                        const char* who) {
    const Matrix shifted = -gen - s * Matrix::Identity(gen.rows(), gen.cols());
    try {
        return solve_linear(shifted.transpose(), init.transpose()).transpose();
    } catch (const SingularityError&) {
        throw DomainError(std::string(who) + ": resolvent singular at s = " +
                          std::to_string(s));
    }
}

}  // namespace

const CSPHModel& validate(const CSPHModel& m) {
    std::ostringstream bad;
    check_probability_vector(m.alpha, "alpha", bad);
    check_subintensity(m.T, "T", bad, /*require_nonpos_rowsum=*/false);
    check_subintensity(m.Q1, "Q1", bad, true);
    check_subintensity(m.Q2, "Q2", bad, true);

    if (m.U.rows() != m.T.rows())
        bad << "U has " << m.U.rows() << " rows, expected " << m.T.rows() << "; ";
    if (m.Q1.rows() != m.U.cols() || m.Q2.rows() != m.U.cols())
        bad << "Q1/Q2 size must match U columns (" << m.U.cols() << "); ";
    if (m.alpha.size() != m.T.rows())
        bad << "alpha length " << m.alpha.size() << " != " << m.T.rows() << "; ";
    for (Eigen::Index i = 0; i < m.U.rows(); ++i)
        for (Eigen::Index j = 0; j < m.U.cols(); ++j)
            if (m.U(i, j) < 0.0)
                bad << "U(" << i << "," << j << ") = " << m.U(i, j)
                    << " must be >= 0; ";

    if (m.U.rows() == m.T.rows() && m.T.rows() == m.T.cols()) {
        const Vector total = m.T.rowwise().sum() + m.U.rowwise().sum();
        const double scale = 1.0 + std::max(norm_inf(m.T), norm_inf(m.U));
        for (Eigen::Index i = 0; i < total.size(); ++i) {
            if (std::abs(total(i)) > kRowSumTol * scale)
                bad << "row " << i << " of [T U] sums to " << total(i)
                    << " (must vanish so the pre-shock phase always exits); ";
        }
    }

    for (const auto* q : {&m.Q1, &m.Q2}) {
        if (q->rows() != q->cols()) continue;
        try {
            solve_linear(-*q, Matrix::Identity(q->rows(), q->rows()));
        } catch (const SingularityError&) {
            bad << (q == &m.Q1 ? "Q1" : "Q2")
                << " is singular (some post-shock state never absorbs); ";
        }
    }

    if (!(m.a1 > 0.0)) bad << "a1 = " << m.a1 << " must be > 0; ";
    if (!(m.a2 > 0.0)) bad << "a2 = " << m.a2 << " must be > 0; ";

    const std::string msg = bad.str();
    if (!msg.empty()) throw ValidationError("invalid CSPH model: " + msg);
    return m;
}

const MPHModel& validate(const MPHModel& m) {
    std::ostringstream bad;
    check_probability_vector(m.pi, "pi", bad);
    check_subintensity(m.S1, "S1", bad, true);
    check_subintensity(m.S2, "S2", bad, true);
    if (m.pi.size() != m.S1.rows() || m.S1.rows() != m.S2.rows())
        bad << "pi/S1/S2 dimensions disagree; ";
    for (const auto* s : {&m.S1, &m.S2}) {
        if (s->rows() != s->cols()) continue;
        try {
            solve_linear(-*s, Matrix::Identity(s->rows(), s->rows()));
        } catch (const SingularityError&) {
            bad << (s == &m.S1 ? "S1" : "S2") << " is singular; ";
        }
    }
    const std::string msg = bad.str();
    if (!msg.empty()) throw ValidationError("invalid mPH model: " + msg);
    return m;
}

Matrix marginal_generator(const CSPHModel& m, int margin) {
    check_margin(margin, "marginal_generator");
    const auto p0 = m.num_pre(), p1 = m.num_post();
    const double a = m.scaling(margin);
    Matrix g = Matrix::Zero(p0 + p1, p0 + p1);
    g.topLeftCorner(p0, p0) = m.T / a;
    g.topRightCorner(p0, p1) = m.U / a;
    g.bottomRightCorner(p1, p1) = m.post_generator(margin);
    return g;
}

double marginal_pdf(const CSPHModel& m, int margin, double x) {
    check_margin(margin, "marginal_pdf");
    if (x < 0.0) return 0.0;
    const Matrix g = marginal_generator(m, margin);
    const Vector exit = -g.rowwise().sum();
    const RowVector row = padded_initial(m) * mat_exp(g * x);
    return row.dot(exit);
}

double marginal_cdf(const CSPHModel& m, int margin, double x) {
    check_margin(margin, "marginal_cdf");
    if (x < 0.0) return 0.0;
    const Matrix g = marginal_generator(m, margin);
    return 1.0 - (padded_initial(m) * mat_exp(g * x)).sum();
}

double marginal_mean(const CSPHModel& m, int margin) {
    const Matrix g = marginal_generator(m, margin);
    const Vector sol = solve_linear(-g, Vector::Ones(g.rows()));
    return padded_initial(m).dot(sol);
}

double shock_density_defective(const CSPHModel& m, Eigen::Index k, double t) {
    check_index(m, k, "shock_density_defective");
    if (t < 0.0) return 0.0;
    const RowVector row = m.alpha * mat_exp(m.T * t);
    return row.dot(m.U.col(k));
}

double shock_density(const CSPHModel& m, double t) {
    if (t < 0.0) return 0.0;
    return (m.alpha * mat_exp(m.T * t) * m.U).sum();
}

double shock_survival(const CSPHModel& m, double t) {
    if (t < 0.0) return 1.0;
    return (m.alpha * mat_exp(m.T * t)).sum();
}

double shock_mgf_defective(const CSPHModel& m, Eigen::Index k, double s) {
    check_index(m, k, "shock_mgf_defective");
    return resolvent_row(m.alpha, m.T, s, "shock_mgf_defective").dot(m.U.col(k));
}

double residual_pdf(const CSPHModel& m, int margin, Eigen::Index k, double y) {
    check_margin(margin, "residual_pdf");
    check_index(m, k, "residual_pdf");
    if (y < 0.0) return 0.0;
    const Matrix& q = m.post_generator(margin);
    return mat_exp(q * y).row(k).dot(m.exit_rates(margin));
}

double residual_cdf(const CSPHModel& m, int margin, Eigen::Index k, double y) {
    check_margin(margin, "residual_cdf");
    check_index(m, k, "residual_cdf");
    if (y < 0.0) return 0.0;
    const Matrix& q = m.post_generator(margin);
    return 1.0 - mat_exp(q * y).row(k).sum();
}

double residual_mgf(const CSPHModel& m, int margin, Eigen::Index k, double s) {
    check_margin(margin, "residual_mgf");
    check_index(m, k, "residual_mgf");
    RowVector ek = RowVector::Zero(m.num_post());
    ek(k) = 1.0;
    return resolvent_row(ek, m.post_generator(margin), s, "residual_mgf")
        .dot(m.exit_rates(margin));
}

CouplingMatrix coupling_matrix(const CSPHModel& m) {
    const auto p1 = m.num_post();
    Matrix p = Matrix::Zero(m.num_pre(), p1 * p1);
    for (Eigen::Index k = 0; k < p1; ++k) p.col(k * p1 + k) = m.U.col(k);
    return CouplingMatrix{std::move(p)};
}

double trivariate_density(const CSPHModel& m, double t, double y1, double y2) {
    if (t < 0.0 || y1 < 0.0 || y2 < 0.0) return 0.0;
    const Matrix p = coupling_matrix(m).P;
    const Vector v1 = mat_exp(m.Q1 * y1) * m.exit_rates(1);
    const Vector v2 = mat_exp(m.Q2 * y2) * m.exit_rates(2);
    const RowVector row = m.alpha * mat_exp(m.T * t) * p;
    return row.dot(kron_vec(v1, v2));
}

double joint_pdf(const CSPHModel& m, double z1, double z2) {
    if (z1 < 0.0 || z2 < 0.0) return 0.0;
    const double w = std::min(z1 / m.a1, z2 / m.a2);
    const Matrix p = coupling_matrix(m).P;
    const Matrix c = kron_sum(m.a1 * m.Q1, m.a2 * m.Q2);
    const Vector v1 = mat_exp(m.Q1 * (z1 - m.a1 * w)) * m.exit_rates(1);
    const Vector v2 = mat_exp(m.Q2 * (z2 - m.a2 * w)) * m.exit_rates(2);
    const RowVector row = m.alpha * van_loan_integral(m.T, p, c, w);
    return row.dot(kron_vec(v1, v2));
}

double joint_cdf(const CSPHModel& m, double z1, double z2) {
    if (z1 <= 0.0 || z2 <= 0.0) return 0.0;
    const auto p1 = m.num_post();
    const double w = std::min(z1 / m.a1, z2 / m.a2);
    const Matrix p = coupling_matrix(m).P;
    const Matrix i = Matrix::Identity(p1, p1);
    const Matrix zero = Matrix::Zero(p1, p1);
    const Vector one = Vector::Ones(p1);
    const Vector s1 = mat_exp(m.Q1 * (z1 - m.a1 * w)) * one;
    const Vector s2 = mat_exp(m.Q2 * (z2 - m.a2 * w)) * one;
    const auto term = [&](const Matrix& c, const Vector& v1, const Vector& v2) {
        const RowVector row = m.alpha * van_loan_integral(m.T, p, c, w);
        return row.dot(kron_vec(v1, v2));
    };
    return term(kron_sum(zero, zero), one, one) -
           term(kron_sum(m.a1 * m.Q1, zero), s1, one) -
           term(kron_sum(zero, m.a2 * m.Q2), one, s2) +
           term(kron_sum(m.a1 * m.Q1, m.a2 * m.Q2), s1, s2);
}

double joint_mgf(const CSPHModel& m, double s1, double s2) {
    double total = 0.0;
    for (Eigen::Index k = 0; k < m.num_post(); ++k) {
        total += shock_mgf_defective(m, k, m.a1 * s1 + m.a2 * s2) *
                 residual_mgf(m, 1, k, s1) * residual_mgf(m, 2, k, s2);
    }
    return total;
}

double mph_joint_pdf(const MPHModel& mph, double y1, double y2) {
    if (y1 < 0.0 || y2 < 0.0) return 0.0;
    const Vector s1 = -mph.S1.rowwise().sum();
    const Vector s2 = -mph.S2.rowwise().sum();
    const Vector f1 = mat_exp(mph.S1 * y1) * s1;
    const Vector f2 = mat_exp(mph.S2 * y2) * s2;
    double total = 0.0;
    for (Eigen::Index j = 0; j < mph.pi.size(); ++j)
        total += mph.pi(j) * f1(j) * f2(j);
    return total;
}

double mph_joint_cdf(const MPHModel& mph, double y1, double y2) {
    if (y1 < 0.0 || y2 < 0.0) return 0.0;
    const Vector surv1 = mat_exp(mph.S1 * y1).rowwise().sum();
    const Vector surv2 = mat_exp(mph.S2 * y2).rowwise().sum();
    double total = 0.0;
    for (Eigen::Index j = 0; j < mph.pi.size(); ++j)
        total += mph.pi(j) * (1.0 - surv1(j)) * (1.0 - surv2(j));
    return total;
}

CSPHModel csph_from_mph(const MPHModel& mph, double lambda, double a1, double a2) {
    if (!(lambda > 0.0)) throw DomainError("csph_from_mph: lambda must be > 0");
    CSPHModel m;
    m.alpha = RowVector::Ones(1);
    m.T = Matrix::Constant(1, 1, -lambda);
    m.U = lambda * mph.pi;
    m.Q1 = mph.S1;
    m.Q2 = mph.S2;
    m.a1 = a1;
    m.a2 = a2;
    validate(m);
    return m;
}

}  // namespace csph
