#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "csph/model.hpp"

namespace csph {

/// Observation pairs for fitting. The likelihood sums per-point logs in
/// sorted order, so its value is reproducible bit-for-bit under any thread
/// count and any permutation of the rows.
struct BivariateDataset {
    std::vector<double> x1, x2;
    std::size_t size() const { return x1.size(); }
};

/// Fit dimensions: pre/post state counts and whether the initial distribution
/// is estimated (softmax logits) or pinned to the first state.
struct ModelStructure {
    int p0 = 3;
    int p1 = 2;
    bool estimate_alpha = false;
};

/// Single-scale parameterization X1 = beta·(tau + r1), X2 = tau + r2. Same
/// family as CSPHModel (phase type is closed under positive scaling); one
/// scaling parameter instead of two.
struct ReducedModel {
    RowVector alpha;
    Matrix T, U, Q1, Q2;
    double beta = 1.0;

    /// Equivalent two-scale model: a1 = beta, a2 = 1, Q1 replaced by Q1/beta
    /// (beta·r1 is PH with the generator slowed down by beta).
    CSPHModel to_csph() const;
};

/// Reduced form of a general model: time is rescaled so the second margin is
/// unscaled, giving (T/a2, U/a2, (a1/a2)·Q1, Q2, beta = a1/a2).
ReducedModel reduce(const CSPHModel& m);

std::size_t param_count(const ModelStructure& s);

/// Unconstrained vector -> valid model: rates are exponentials of the free
/// parameters, diagonals absorb row sums, alpha is softmax (or e1). Always
/// passes validation.
ReducedModel to_model(const ModelStructure& s, const Vector& theta_free);

/// Inverse map on interior points; exact-zero rates are floored at 1e-13
/// before the log so round trips stay within 1e-12.
Vector from_model(const ModelStructure& s, const ReducedModel& m);

/// Sum of log joint densities. Densities that vanish or lose finiteness are
/// floored at -1e12 per point (any_floored reports it), so line searches can
/// back off instead of failing.
double log_likelihood(const ReducedModel& m, const BivariateDataset& data,
                      int threads = 1, bool* any_floored = nullptr);

/// Central finite differences of theta |-> log_likelihood(to_model(theta)),
/// step 1e-6·(1+|theta_j|) per coordinate.
Vector fd_gradient(const ModelStructure& s, const Vector& theta_free,
                   const BivariateDataset& data, int threads = 1);

struct FitOptions {
    int max_iter = 2000;
    int memory = 10;       // L-BFGS history length
    double grad_tol = 1e-5;
    double rel_tol = 1e-9;  // relative log-likelihood change
    int n_starts = 5;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct FitResult {
    ReducedModel model;
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;
    std::vector<std::pair<int, double>> trace;  // (iteration, loglik)
};

/// Maximum-likelihood fit by L-BFGS (two-loop recursion, strong Wolfe line
/// search) over the unconstrained parameterization, best of `n_starts` seeded
/// random starts near the all-rates-one point (log-rates ~ N(0, 0.5^2)).
/// `init`, when given, replaces the first start.
FitResult fit(const BivariateDataset& data, const ModelStructure& s,
              const std::optional<Vector>& init, const FitOptions& options);

}  // namespace csph
