#include "csph/fit.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "csph/errors.hpp"

namespace csph {

namespace {

constexpr double kLogFloor = -1e12;
constexpr double kRateFloor = 1e-13;
constexpr std::size_t kChunk = 256;

int effective_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

CSPHModel ReducedModel::to_csph() const {
    CSPHModel m;
    m.alpha = alpha;
    m.T = T;
    m.U = U;
    m.Q1 = Q1 / beta;
    m.Q2 = Q2;
    m.a1 = beta;
    m.a2 = 1.0;
    return m;
}

ReducedModel reduce(const CSPHModel& m) {
    ReducedModel r;
    r.alpha = m.alpha;
    r.T = m.T / m.a2;
    r.U = m.U / m.a2;
    r.beta = m.a1 / m.a2;
    r.Q1 = r.beta * m.Q1;
    r.Q2 = m.Q2;
    return r;
}

std::size_t param_count(const ModelStructure& s) {
    const std::size_t p0 = s.p0, p1 = s.p1;
    std::size_t n = p0 * (p0 - 1)   // T off-diagonal
                    + p0 * p1       // U
                    + 2 * p1 * (p1 - 1)  // Q1, Q2 off-diagonal
                    + 2 * p1        // exit rates
                    + 1;            // log beta
    if (s.estimate_alpha) n += p0;
    return n;
}

ReducedModel to_model(const ModelStructure& s, const Vector& theta_free) {
    if (static_cast<std::size_t>(theta_free.size()) != param_count(s)) {
        throw DimensionError("to_model: expected " +
                             std::to_string(param_count(s)) + " parameters, got " +
                             std::to_string(theta_free.size()));
    }
    const int p0 = s.p0, p1 = s.p1;
    Eigen::Index pos = 0;
    auto take = [&] { return std::exp(theta_free(pos++)); };

    ReducedModel m;
    m.T = Matrix::Zero(p0, p0);
    for (int i = 0; i < p0; ++i)
        for (int j = 0; j < p0; ++j)
            if (i != j) m.T(i, j) = take();
    m.U = Matrix::Zero(p0, p1);
    for (int i = 0; i < p0; ++i)
        for (int j = 0; j < p1; ++j) m.U(i, j) = take();
    for (int i = 0; i < p0; ++i)
        m.T(i, i) = -(m.T.row(i).sum() + m.U.row(i).sum());

    auto build_q = [&](Matrix& q) {
        q = Matrix::Zero(p1, p1);
        for (int i = 0; i < p1; ++i)
            for (int j = 0; j < p1; ++j)
                if (i != j) q(i, j) = take();
        for (int i = 0; i < p1; ++i) {
            const double exit = take();
            q(i, i) = -(q.row(i).sum() + exit);
        }
    };
    build_q(m.Q1);
    build_q(m.Q2);
    m.beta = take();

    if (s.estimate_alpha) {
        // Softmax with the max subtracted for overflow safety.
        Vector logits = theta_free.segment(pos, p0);
        pos += p0;
        const double top = logits.maxCoeff();
        Vector w = (logits.array() - top).exp();
        m.alpha = (w / w.sum()).transpose();
    } else {
        m.alpha = RowVector::Zero(p0);
        m.alpha(0) = 1.0;
    }
    return m;
}

Vector from_model(const ModelStructure& s, const ReducedModel& m) {
    const int p0 = s.p0, p1 = s.p1;
    Vector theta(param_count(s));
    Eigen::Index pos = 0;
    auto put = [&](double rate) { theta(pos++) = std::log(std::max(rate, kRateFloor)); };

    for (int i = 0; i < p0; ++i)
        for (int j = 0; j < p0; ++j)
            if (i != j) put(m.T(i, j));
    for (int i = 0; i < p0; ++i)
        for (int j = 0; j < p1; ++j) put(m.U(i, j));
    auto put_q = [&](const Matrix& q) {
        for (int i = 0; i < p1; ++i)
            for (int j = 0; j < p1; ++j)
                if (i != j) put(q(i, j));
        for (int i = 0; i < p1; ++i) put(-q.row(i).sum());
    };
    put_q(m.Q1);
    put_q(m.Q2);
    put(m.beta);
    if (s.estimate_alpha)
        for (int i = 0; i < p0; ++i) put(m.alpha(i));
    return theta;
}

double log_likelihood(const ReducedModel& m, const BivariateDataset& data,
                      int threads, bool* any_floored) {
    const CSPHModel csph = m.to_csph();
    const std::size_t n = data.size();
    std::vector<double> logs(n);

    auto run_chunk = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            double density;
            try {
                density = joint_pdf(csph, data.x1[i], data.x2[i]);
            } catch (const NumericError&) {
                density = 0.0;
            }
            logs[i] = density > 0.0 && std::isfinite(density) ? std::log(density)
                                                              : kLogFloor;
        }
    };

    const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
    const int n_threads = static_cast<int>(std::min<std::size_t>(
        effective_threads(threads), std::max<std::size_t>(n_chunks, 1)));
    if (n_threads <= 1) {
        run_chunk(0, n);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t c = t; c < n_chunks; c += n_threads)
                    run_chunk(c * kChunk, std::min(c * kChunk + kChunk, n));
            });
        }
        for (auto& th : pool) th.join();
    }

    // Summing in sorted order makes the value independent of both the thread
    // schedule and the row order of the dataset.
    std::vector<double> ordered = logs;
    std::sort(ordered.begin(), ordered.end());
    double total = 0.0;
    for (double v : ordered) total += v;
    if (any_floored)
        *any_floored = !ordered.empty() && ordered.front() <= kLogFloor;
    return total;
}

Vector fd_gradient(const ModelStructure& s, const Vector& theta_free,
                   const BivariateDataset& data, int threads) {
    Vector grad(theta_free.size());
    Vector probe = theta_free;
    for (Eigen::Index j = 0; j < theta_free.size(); ++j) {
        const double h = 1e-6 * (1.0 + std::abs(theta_free(j)));
        probe(j) = theta_free(j) + h;
        const double up = log_likelihood(to_model(s, probe), data, threads);
        probe(j) = theta_free(j) - h;
        const double down = log_likelihood(to_model(s, probe), data, threads);
        probe(j) = theta_free(j);
        if (!std::isfinite(up) || !std::isfinite(down)) {
            throw NumericError("fd_gradient: non-finite likelihood probing coordinate " +
                               std::to_string(j));
        }
        grad(j) = (up - down) / (2.0 * h);
    }
    return grad;
}

namespace {

struct StartOutcome {
    Vector theta;
    double loglik = -std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    double gradient_norm = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, double>> trace;
    std::string failure;
};

// Strong Wolfe line search on phi(a) = f(x + a·d) (f = negative loglik),
// bracketing plus bisection-style zoom. The curvature slope is only probed
// once a trial already satisfies sufficient decrease.
struct LineSearchResult {
    double step = 0.0;
    double f = 0.0;
    bool ok = false;
};

template <typename Value, typename Slope>
LineSearchResult wolfe_search(const Value& value_at, const Slope& slope_at,
                              double f0, double slope0, double initial_step) {
    constexpr double c1 = 1e-4, c2 = 0.9;
    constexpr int max_evals = 30;

    auto zoom = [&](double lo, double f_lo, double hi) -> LineSearchResult {
        for (int it = 0; it < max_evals; ++it) {
            const double a = 0.5 * (lo + hi);
            const double fa = value_at(a);
            if (fa > f0 + c1 * a * slope0 || fa >= f_lo) {
                hi = a;
            } else {
                const double slope_a = slope_at(a);
                if (std::abs(slope_a) <= -c2 * slope0) return {a, fa, true};
                if (slope_a * (hi - lo) >= 0.0) hi = lo;
                lo = a;
                f_lo = fa;
            }
            if (std::abs(hi - lo) < 1e-14 * (1.0 + std::abs(lo)))
                return {lo, f_lo, true};
        }
        return {lo, f_lo, true};
    };

    double prev_a = 0.0, prev_f = f0;
    double a = initial_step;
    for (int it = 0; it < max_evals; ++it) {
        const double fa = value_at(a);
        if (fa > f0 + c1 * a * slope0 || (it > 0 && fa >= prev_f))
            return zoom(prev_a, prev_f, a);
        const double slope_a = slope_at(a);
        if (std::abs(slope_a) <= -c2 * slope0) return {a, fa, true};
        if (slope_a >= 0.0) return zoom(a, fa, prev_a);
        prev_a = a;
        prev_f = fa;
        a *= 2.0;
    }
    return {};
}

StartOutcome run_lbfgs(const BivariateDataset& data, const ModelStructure& s,
                       const Vector& theta0, const FitOptions& opt) {
    StartOutcome out;
    out.theta = theta0;

    auto value = [&](const Vector& th) {
        return -log_likelihood(to_model(s, th), data, opt.threads);
    };
    auto grad_at = [&](const Vector& th) {
        return Vector(-fd_gradient(s, th, data, opt.threads));
    };

    Vector x = theta0;
    double f = value(x);
    if (!std::isfinite(f)) {
        out.failure = "non-finite objective at the start point";
        return out;
    }
    Vector g = grad_at(x);
    out.trace.emplace_back(0, -f);

    std::deque<Vector> s_hist, y_hist;
    std::deque<double> rho_hist;
    int small_changes = 0;  // consecutive iterations below the relative tolerance

    for (int iter = 1; iter <= opt.max_iter; ++iter) {
        // Two-loop recursion for the search direction.
        Vector q = g;
        std::vector<double> alpha_coef(s_hist.size());
        for (std::size_t i = s_hist.size(); i-- > 0;) {
            alpha_coef[i] = rho_hist[i] * s_hist[i].dot(q);
            q -= alpha_coef[i] * y_hist[i];
        }
        if (!s_hist.empty()) {
            const double gamma =
                s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
            q *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta_coef = rho_hist[i] * y_hist[i].dot(q);
            q += (alpha_coef[i] - beta_coef) * s_hist[i];
        }
        Vector d = -q;
        double slope = g.dot(d);
        if (slope >= 0.0) {  // history became stale; reset to steepest descent
            d = -g;
            slope = g.dot(d);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        // Wolfe trials need the directional derivative only, which two
        // objective evaluations along d give far cheaper than a full
        // finite-difference gradient.
        const auto value_at = [&](double a) { return value(x + a * d); };
        const auto slope_at = [&](double a) {
            const double h = 1e-6 * (1.0 + std::abs(a));
            return (value(x + (a + h) * d) - value(x + (a - h) * d)) / (2.0 * h);
        };
        const double step0 =
            iter == 1 ? 1.0 / std::max(1.0, g.norm()) : 1.0;
        const LineSearchResult ls = wolfe_search(value_at, slope_at, f, slope, step0);
        if (!ls.ok || !(ls.step > 0.0)) {
            // Stalled at the finite-difference noise floor; call it converged
            // when the gradient is stationary at that resolution.
            out.converged = g.norm() <= 1e-4 * (1.0 + std::abs(f));
            break;
        }

        const Vector x_new = x + ls.step * d;
        const Vector g_new = grad_at(x_new);
        const double f_new = ls.f;

        const Vector sv = x_new - x;
        const Vector yv = g_new - g;
        const double sy = sv.dot(yv);
        if (sy > 1e-12 * sv.norm() * yv.norm()) {
            s_hist.push_back(sv);
            y_hist.push_back(yv);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opt.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        const double rel_change = std::abs(f - f_new) / (1.0 + std::abs(f_new));
        x = x_new;
        f = f_new;
        g = g_new;
        out.iterations = iter;
        out.trace.emplace_back(iter, -f);
        out.gradient_norm = g.norm();

        // A single microscopic step can be a line-search artifact; require the
        // relative change to stay small across consecutive iterations.
        small_changes = rel_change < opt.rel_tol ? small_changes + 1 : 0;
        if (out.gradient_norm < opt.grad_tol || small_changes >= 2) {
            out.converged = true;
            break;
        }
    }

    out.theta = x;
    out.loglik = -f;
    out.gradient_norm = g.norm();
    return out;
}

}  // namespace

FitResult fit(const BivariateDataset& data, const ModelStructure& s,
              const std::optional<Vector>& init, const FitOptions& options) {
    if (data.size() == 0) throw FitError("fit: empty dataset");
    if (data.x1.size() != data.x2.size())
        throw DimensionError("fit: dataset columns have different lengths");

    std::mt19937_64 seeder(options.seed);
    std::normal_distribution<double> jitter(0.0, 0.5);

    std::vector<StartOutcome> outcomes;
    const int n_starts = std::max(options.n_starts, 1);
    for (int start = 0; start < n_starts; ++start) {
        Vector theta0(param_count(s));
        if (start == 0 && init) {
            if (static_cast<std::size_t>(init->size()) != param_count(s))
                throw DimensionError("fit: init has the wrong dimension");
            theta0 = *init;
        } else {
            for (Eigen::Index j = 0; j < theta0.size(); ++j) theta0(j) = jitter(seeder);
        }
        outcomes.push_back(run_lbfgs(data, s, theta0, options));
    }

    const auto best = std::max_element(
        outcomes.begin(), outcomes.end(),
        [](const StartOutcome& a, const StartOutcome& b) { return a.loglik < b.loglik; });
    if (!std::isfinite(best->loglik)) {
        std::ostringstream diag;
        diag << "fit: all " << n_starts << " starts failed:";
        for (std::size_t i = 0; i < outcomes.size(); ++i)
            diag << " [start " << i << ": "
                 << (outcomes[i].failure.empty() ? "diverged" : outcomes[i].failure)
                 << "]";
        throw FitError(diag.str());
    }

    FitResult result;
    result.model = to_model(s, best->theta);
    result.loglik = best->loglik;
    result.iterations = best->iterations;
    result.converged = best->converged;
    result.gradient_norm = best->gradient_norm;
    result.trace = best->trace;
    return result;
}

}  // namespace csph
