#include "csph/risk.hpp"

#include <cmath>
#include <string>

#include "csph/errors.hpp"

namespace csph {

namespace {

constexpr double kVarTol = 1e-8;

double tail_prob(const CSPHModel& m, double a) {
    MasterQuery q;
    q.y = {a, 0.0, 0.0};
    const double p = master_moment(m, q);
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw DomainError("conditional measure: P(tau > " + std::to_string(a) +
                          ") underflows to " + std::to_string(p));
    }
    return p;
}

double moment(const CSPHModel& m, int n12, int n1, int n2, double a = 0.0) {
    MasterQuery q;
    q.n = {n12, n1, n2};
    q.y = {a, 0.0, 0.0};
    return master_moment(m, q);
}

}  // namespace

MomentSet moment_set(const CSPHModel& m) {
    MomentSet s{};
    const double m100 = moment(m, 1, 0, 0);
    const double m200 = moment(m, 2, 0, 0);
    s.e_tau = m100;
    s.e_x1 = m.a1 * m100 + moment(m, 0, 1, 0);
    s.e_x2 = m.a2 * m100 + moment(m, 0, 0, 1);
    s.e_x1_sq = m.a1 * m.a1 * m200 + 2.0 * m.a1 * moment(m, 1, 1, 0) +
                moment(m, 0, 2, 0);
    s.e_x2_sq = m.a2 * m.a2 * m200 + 2.0 * m.a2 * moment(m, 1, 0, 1) +
                moment(m, 0, 0, 2);
    s.e_x1x2 = m.a1 * m.a2 * m200 + m.a1 * moment(m, 1, 0, 1) +
               m.a2 * moment(m, 1, 1, 0) + moment(m, 0, 1, 1);
    return s;
}

double pearson(const CSPHModel& m) {
    const MomentSet s = moment_set(m);
    if (!(s.var1() > 0.0) || !(s.var2() > 0.0)) {
        throw DomainError("pearson: degenerate margin (variance " +
                          std::to_string(s.var1()) + ", " +
                          std::to_string(s.var2()) + ")");
    }
    return s.cov() / std::sqrt(s.var1() * s.var2());
}

double entropic_risk(const CSPHModel& m, int margin, double vartheta, double a) {
    if (!(vartheta > 0.0))
        throw DomainError("entropic_risk: vartheta must be > 0");
    if (a < 0.0) throw DomainError("entropic_risk: threshold must be >= 0");
    MasterQuery q;
    q.theta = {m.scaling(margin) * vartheta, margin == 1 ? vartheta : 0.0,
               margin == 2 ? vartheta : 0.0};
    q.y = {a, 0.0, 0.0};
    const double numerator = master_moment(m, q);
    return std::log(numerator / tail_prob(m, a)) / vartheta;
}

double value_at_risk(const CSPHModel& m, int margin, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw DomainError("value_at_risk: level must lie in (0, 1)");
    const double mean = marginal_mean(m, margin);
    double hi = std::max(mean, 1e-6);
    const double cap = 1e6 * std::max(mean, 1.0);
    while (marginal_cdf(m, margin, hi) < level) {
        hi *= 2.0;
        if (hi > cap) {
            throw NumericError("value_at_risk: bracket expansion exceeded " +
                               std::to_string(cap));
        }
    }
    double lo = 0.0;
    while (hi - lo > kVarTol) {
        const double mid = 0.5 * (lo + hi);
        if (marginal_cdf(m, margin, mid) >= level)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double cvar_cs(const CSPHModel& m, int margin, double a) {
    if (a < 0.0) throw DomainError("cvar_cs: threshold must be >= 0");
    const double denom = tail_prob(m, a);
    const double shock = moment(m, 1, 0, 0, a);
    const double resid =
        margin == 1 ? moment(m, 0, 1, 0, a) : moment(m, 0, 0, 1, a);
    return (m.scaling(margin) * shock + resid) / denom;
}

double mtce_cs(const CSPHModel& m, double a) {
    if (a < 0.0) throw DomainError("mtce_cs: threshold must be >= 0");
    const double denom = tail_prob(m, a);
    const double num = m.a1 * m.a2 * moment(m, 2, 0, 0, a) +
                       m.a1 * moment(m, 1, 0, 1, a) +
                       m.a2 * moment(m, 1, 1, 0, a) + moment(m, 0, 1, 1, a);
    return num / denom;
}

double mtcov_cs(const CSPHModel& m, double a) {
    return mtce_cs(m, a) - cvar_cs(m, 1, a) * cvar_cs(m, 2, a);
}

double regular_variation_index(const CSPHModel& m, int margin) {
    return -spectral_abscissa(marginal_generator(m, margin));
}

RiskReport build_risk_report(const CSPHModel& m, const std::vector<double>& levels,
                             const std::vector<double>& a_grid,
                             const std::vector<double>& vartheta_grid) {
    RiskReport r{};
    const MomentSet s = moment_set(m);
    r.mean1 = s.e_x1;
    r.mean2 = s.e_x2;
    r.var1 = s.var1();
    r.var2 = s.var2();
    r.pearson = pearson(m);
    for (double level : levels) {
        r.var_at_risk[level] = {value_at_risk(m, 1, level),
                                value_at_risk(m, 2, level)};
    }
    r.a_grid = a_grid;
    for (double a : a_grid) {
        r.cvar_cs.emplace_back(cvar_cs(m, 1, a), cvar_cs(m, 2, a));
        r.mtce_cs.push_back(mtce_cs(m, a));
        r.mtcov_cs.push_back(mtcov_cs(m, a));
    }
    r.vartheta_grid = vartheta_grid;
    for (double vt : vartheta_grid) {
        std::vector<std::pair<double, double>> curve;
        curve.reserve(a_grid.size());
        for (double a : a_grid)
            curve.emplace_back(entropic_risk(m, 1, vt, a),
                               entropic_risk(m, 2, vt, a));
        r.erm.push_back(std::move(curve));
    }
    r.tail_index = {regular_variation_index(m, 1), regular_variation_index(m, 2)};
    return r;
}

std::vector<double> default_a_grid(const CSPHModel& m, int points) {
    // Invert the shock-time survival for the 0.99 quantile; the shock time is
    // PH(alpha, T).
    double hi = 1.0;
    while (shock_survival(m, hi) > 0.01 && hi < 1e9) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-10 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (shock_survival(m, mid) > 0.01 ? lo : hi) = mid;
    }
    std::vector<double> grid;
    grid.reserve(points);
    for (int i = 0; i < points; ++i)
        grid.push_back(hi * static_cast<double>(i) / std::max(points - 1, 1));
    return grid;
}

}  // namespace csph
