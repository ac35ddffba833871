#pragma once

#include <map>
#include <utility>
#include <vector>

#include "csph/master.hpp"

namespace csph {

/// First and second moments of (X1, X2) plus the shock-time mean, all obtained
/// from the transformed-moment engine.
struct MomentSet {
    double e_x1, e_x2;
    double e_x1_sq, e_x2_sq;
    double e_x1x2;
    double e_tau;

    double var1() const { return e_x1_sq - e_x1 * e_x1; }
    double var2() const { return e_x2_sq - e_x2 * e_x2; }
    double cov() const { return e_x1x2 - e_x1 * e_x2; }
};

MomentSet moment_set(const CSPHModel& m);

/// Linear correlation of (X1, X2). Throws DomainError on a degenerate margin.
double pearson(const CSPHModel& m);

/// Entropic risk of margin i given the shock happens after `a`:
/// (1/vartheta)·log E[e^{-vartheta·X_i} | tau > a]. a = 0 gives the
/// unconditional measure.
double entropic_risk(const CSPHModel& m, int margin, double vartheta, double a);

/// Quantile of margin i: leftmost root of marginal_cdf - level, bracketed by
/// doubling from the marginal mean and bisected to 1e-8.
double value_at_risk(const CSPHModel& m, int margin, double level);

/// E[X_i | tau > a].
double cvar_cs(const CSPHModel& m, int margin, double a);

/// E[X1·X2 | tau > a].
double mtce_cs(const CSPHModel& m, double a);

/// Cov(X1, X2 | tau > a).
double mtcov_cs(const CSPHModel& m, double a);

/// Tail index of margin i when the model was fitted on log scale:
/// minus the spectral abscissa of the marginal generator.
double regular_variation_index(const CSPHModel& m, int margin);

/// Aggregated report consumed by the CLI: scalar summaries plus measure
/// curves over caller-supplied grids.
struct RiskReport {
    double mean1, mean2, var1, var2, pearson;
    std::map<double, std::pair<double, double>> var_at_risk;  // level -> (v1, v2)
    std::vector<double> a_grid;
    std::vector<std::pair<double, double>> cvar_cs;    // (margin1, margin2) per a
    std::vector<double> mtce_cs, mtcov_cs;             // per a
    std::vector<double> vartheta_grid;
    std::vector<std::vector<std::pair<double, double>>> erm;  // [vartheta][a] -> (m1, m2)
    std::pair<double, double> tail_index;
};

RiskReport build_risk_report(const CSPHModel& m, const std::vector<double>& levels,
                             const std::vector<double>& a_grid,
                             const std::vector<double>& vartheta_grid);

/// Default threshold grid: `points` values from 0 to the 0.99 quantile of the
/// shock time.
std::vector<double> default_a_grid(const CSPHModel& m, int points = 50);

}  // namespace csph
