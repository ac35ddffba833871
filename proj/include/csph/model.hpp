#pragma once

#include "csph/linalg.hpp"

namespace csph {

/// Bivariate common-shock phase-type model.
///
/// States split into a pre-shock space E (size p0) and a post-shock space S
/// (size p1). The coupled process starts on E from `alpha`, moves inside E by
/// `T`, and jumps into S at the shock time with rates `U`. After the shock the
/// two margins run independently on S under `Q1` and `Q2`; margin i observes
/// X_i = a_i·(shock time) + (its residual absorption time).
struct CSPHModel {
    RowVector alpha;  // initial distribution over E
    Matrix T;         // p0 x p0 subintensity on E
    Matrix U;         // p0 x p1 exit rates E -> S
    Matrix Q1, Q2;    // p1 x p1 post-shock subintensities
    double a1 = 1.0, a2 = 1.0;  // shock scaling factors

    Eigen::Index num_pre() const { return T.rows(); }
    Eigen::Index num_post() const { return Q1.rows(); }

    const Matrix& post_generator(int margin) const { return margin == 1 ? Q1 : Q2; }
    double scaling(int margin) const { return margin == 1 ? a1 : a2; }

    /// Exit-rate vector q_i = -Q_i·1 of margin i.
    Vector exit_rates(int margin) const { return -post_generator(margin).rowwise().sum(); }
};

/// Mixture-type bivariate phase-type model: a shared initial state drawn from
/// `pi`, then independent PH(e_j, S_i) margins.
struct MPHModel {
    RowVector pi;
    Matrix S1, S2;
};

/// p0 x p1² coupling matrix P = Σ_k u^(k)(e_kᵀ ⊗ e_kᵀ): column (k·p1 + k)
/// holds the k-th column of U, all other columns are zero.
struct CouplingMatrix {
    Matrix P;
};

/// Checks every structural invariant (probability vector, subintensity signs,
/// zero row sums of [T U], nonsingular -Q_i, positive scalings). Throws
/// ValidationError listing all violations; returns the model untouched.
const CSPHModel& validate(const CSPHModel& m);

const MPHModel& validate(const MPHModel& m);

/// Subintensity [[T/a_i, U/a_i],[0, Q_i]] whose absorption time from
/// (alpha, 0) is distributed as X_i.
Matrix marginal_generator(const CSPHModel& m, int margin);

double marginal_pdf(const CSPHModel& m, int margin, double x);
double marginal_cdf(const CSPHModel& m, int margin, double x);

/// Mean of X_i, i.e. (alpha,0)·(-G_i)⁻¹·1.
double marginal_mean(const CSPHModel& m, int margin);

/// Defective density of the shock time landing in post-shock state k
/// (0-based): alpha·e^{Tt}·u^(k).
double shock_density_defective(const CSPHModel& m, Eigen::Index k, double t);

/// Density of the shock time: alpha·e^{Tt}·U·1.
double shock_density(const CSPHModel& m, double t);

/// P(shock time > t) = alpha·e^{Tt}·1.
double shock_survival(const CSPHModel& m, double t);

/// E[e^{s·tau}·1{K=k}] = alpha·(-T - sI)⁻¹·u^(k); at s=0 this is P(K=k).
double shock_mgf_defective(const CSPHModel& m, Eigen::Index k, double s);

/// PH(e_k, Q_i) residual quantities of margin i given entry state k.
double residual_pdf(const CSPHModel& m, int margin, Eigen::Index k, double y);
double residual_cdf(const CSPHModel& m, int margin, Eigen::Index k, double y);
double residual_mgf(const CSPHModel& m, int margin, Eigen::Index k, double s);

CouplingMatrix coupling_matrix(const CSPHModel& m);

/// Joint density of (shock time, residual 1, residual 2) at (t, y1, y2).
double trivariate_density(const CSPHModel& m, double t, double y1, double y2);

/// Joint density of (X1, X2).
double joint_pdf(const CSPHModel& m, double z1, double z2);

/// Joint distribution function of (X1, X2).
double joint_cdf(const CSPHModel& m, double z1, double z2);

/// E[e^{s1·X1 + s2·X2}].
double joint_mgf(const CSPHModel& m, double s1, double s2);

double mph_joint_pdf(const MPHModel& mph, double y1, double y2);
double mph_joint_cdf(const MPHModel& mph, double y1, double y2);

/// Single-pre-shock-state embedding of an mPH model: E = {0} with exit rate
/// `lambda`, U = lambda·pi, Q_i = S_i. Converges weakly to the mPH law as
/// lambda grows.
CSPHModel csph_from_mph(const MPHModel& mph, double lambda, double a1, double a2);

}  // namespace csph
