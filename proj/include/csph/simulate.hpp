#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "csph/model.hpp"

namespace csph {

/// One simulated draw with its latent decomposition. Always satisfies
/// x_i = a_i·tau12 + resid_i exactly (the sums are formed once, not re-derived).
struct SampleRecord {
    double x1, x2;
    double tau12;
    int k;  // post-shock entry state, 0-based
    double resid1, resid2;
};

/// xoshiro256** with splitmix64 state initialization. Identical seeds yield
/// identical streams; substreams for parallel dataset generation are derived
/// per record index (see sample_dataset).
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();

    /// Uniform draw in (0, 1).
    double uniform();

    /// Exponential holding time with the given rate.
    double exponential(double rate);

    /// Index into `weights` (nonnegative, not all zero) drawn proportionally.
    Eigen::Index categorical(const Vector& weights);

  private:
    std::uint64_t state_[4];
};

/// Runs the embedded jump chain on the pre-shock space until it exits into a
/// post-shock state: exponential holding with the row's total rate, next state
/// proportional to rates. Returns (exit time, exit state).
std::pair<double, int> sample_ctmc_exit(const Matrix& T, const Matrix& U,
                                        const RowVector& init, Rng& rng);

SampleRecord sample_csph(const CSPHModel& m, Rng& rng);

/// n independent records; record i is drawn from its own counter-derived
/// substream of `seed`, so the output is reproducible and order-deterministic
/// under any parallel schedule.
std::vector<SampleRecord> sample_dataset(const CSPHModel& m, std::size_t n,
                                         std::uint64_t seed);

}  // namespace csph
