#pragma once

#include "csph/model.hpp"

namespace csph {

/// Law of the entry state given the shock happened exactly at time t.
struct ConditionalWeights {
    double t;
    Vector weights;  // probability vector over the post-shock states
};

/// pi_k(t) = alpha·e^{Tt}·u^(k) / alpha·e^{Tt}·U·1. Throws DomainError when
/// the denominator underflows (t far in the tail).
ConditionalWeights entry_weights(const CSPHModel& m, double t);

/// Mixture mean / variance of residual i given the shock time equals t.
double cond_mean(const CSPHModel& m, int margin, double t);
double cond_var(const CSPHModel& m, int margin, double t);

/// E[r1·r2 | shock = t] via the conditional-independence mixture.
double cond_cross_moment(const CSPHModel& m, double t);

/// Pearson correlation of the residual pair given the shock time equals t.
/// Shifting both residuals by the (deterministic) scaled shock leaves linear
/// and rank correlations unchanged, so these also apply to (X1, X2) given t.
double cond_pearson(const CSPHModel& m, double t);

/// c_km = P(residual started in m exceeds an independent copy started in k)
/// = 1 - (e_k ⊗ e_m)·(-(Q_i ⊕ Q_i))^{-1}·(1 ⊗ q_i), i.e. ∫ F_k dF_m.
double kendall_coefficient(const CSPHModel& m, int margin, Eigen::Index k,
                           Eigen::Index mstate);

double cond_kendall(const CSPHModel& m, double t);
double cond_spearman(const CSPHModel& m, double t);

}  // namespace csph
