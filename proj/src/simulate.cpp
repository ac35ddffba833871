#include "csph/simulate.hpp"

#include <cmath>
#include <string>

#include "csph/errors.hpp"

namespace csph {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

// Substream seed for record `index`: one splitmix64 pass over the mixed pair.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    (void)splitmix64(s);
    s ^= index + 0x9e3779b97f4a7c15ULL;
    return splitmix64(s);
}

// Residual absorption time of PH(e_k, Q) by the embedded jump chain.
double sample_residual(const Matrix& q, const Vector& exit, Eigen::Index start,
                       Rng& rng) {
    const auto p = q.rows();
    Eigen::Index state = start;
    double time = 0.0;
    Vector weights(p + 1);
    while (true) {
        double total = exit(state);
        for (Eigen::Index j = 0; j < p; ++j) {
            weights(j) = j == state ? 0.0 : q(state, j);
            total += weights(j);
        }
        weights(p) = exit(state);
        if (!(total > 0.0)) {
            throw ValidationError("sample: absorbing post-shock state " +
                                  std::to_string(state));
        }
        time += rng.exponential(total);
        const Eigen::Index next = rng.categorical(weights);
        if (next == p) return time;
        state = next;
    }
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() {
    // 53-bit mantissa; shifted into (0,1) so log() below never sees zero.
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return u + 0x1.0p-54;
}

double Rng::exponential(double rate) { return -std::log(uniform()) / rate; }

Eigen::Index Rng::categorical(const Vector& weights) {
    const double total = weights.sum();
    double u = uniform() * total;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        u -= weights(i);
        if (u <= 0.0) return i;
    }
    return weights.size() - 1;
}

std::pair<double, int> sample_ctmc_exit(const Matrix& T, const Matrix& U,
                                        const RowVector& init, Rng& rng) {
    const auto p0 = T.rows();
    const auto p1 = U.cols();
    Eigen::Index state = rng.categorical(init.transpose());
    double time = 0.0;
    Vector weights(p0 + p1);
    while (true) {
        double total = 0.0;
        for (Eigen::Index j = 0; j < p0; ++j) {
            weights(j) = j == state ? 0.0 : T(state, j);
            total += weights(j);
        }
        for (Eigen::Index j = 0; j < p1; ++j) {
            weights(p0 + j) = U(state, j);
            total += weights(p0 + j);
        }
        if (!(total > 0.0)) {
            throw ValidationError("sample_ctmc_exit: pre-shock state " +
                                  std::to_string(state) + " has no outgoing rate");
        }
        time += rng.exponential(total);
        const Eigen::Index next = rng.categorical(weights);
        if (next >= p0) return {time, static_cast<int>(next - p0)};
        state = next;
    }
}

SampleRecord sample_csph(const CSPHModel& m, Rng& rng) {
    const auto [tau, k] = sample_ctmc_exit(m.T, m.U, m.alpha, rng);
    const double r1 = sample_residual(m.Q1, m.exit_rates(1), k, rng);
    const double r2 = sample_residual(m.Q2, m.exit_rates(2), k, rng);
    return SampleRecord{m.a1 * tau + r1, m.a2 * tau + r2, tau, k, r1, r2};
}

std::vector<SampleRecord> sample_dataset(const CSPHModel& m, std::size_t n,
                                         std::uint64_t seed) {
    std::vector<SampleRecord> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(substream_seed(seed, i));
        out[i] = sample_csph(m, rng);
    }
    return out;
}

}  // namespace csph
