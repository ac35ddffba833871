#pragma once

#include <array>

#include "csph/model.hpp"

namespace csph {

/// Query for the transformed-moment engine: size-biasing powers n, exponential
/// tilts theta, and tail thresholds y, each ordered (shock, residual 1,
/// residual 2).
struct MasterQuery {
    std::array<int, 3> n{0, 0, 0};
    std::array<double, 3> theta{0.0, 0.0, 0.0};
    std::array<double, 3> y{0.0, 0.0, 0.0};
};

/// Block upper-bidiagonal lift of a generator: N+1 diagonal blocks M - theta·I
/// with identity blocks on the superdiagonal. The top-right p x p block of
/// e^{assembled·x} equals e^{(M-theta·I)x}·x^N/N!.
struct AugmentedGenerator {
    Matrix assembled;
    int order = 0;           // N
    double shift = 0.0;      // theta
    Eigen::Index block_dim;  // p
};

AugmentedGenerator augment_generator(const Matrix& m, int order, double theta);

/// (alpha, 0, ..., 0) padded to N+1 blocks.
RowVector augment_initial(const RowVector& alpha, int order);

/// (0; ...; 0; q) padded to N+1 blocks.
Vector augment_exit(const Vector& q, int order);

/// (0; ...; 0; I): selects the last block row.
Matrix selector_down(int order, Eigen::Index p);

/// (I, 0, ..., 0): selects the first block column.
Matrix selector_left(int order, Eigen::Index p);

/// Unnormalized size-biased Esscher density of (shock, residual 1, residual 2)
/// at x: x₁₂ⁿ¹² x₁ⁿ¹ x₂ⁿ² e^{-θ·x} g(x), evaluated through the augmented
/// block-matrix products.
double sb_esscher_numerator(const CSPHModel& m, const std::array<int, 3>& n,
                            const std::array<double, 3>& theta,
                            const std::array<double, 3>& x);

/// E[(τ^{n12} e^{-θ12 τ})(r1^{n1} e^{-θ1 r1})(r2^{n2} e^{-θ2 r2})
///   1{τ>y12, r1>y1, r2>y2}] for the shock time τ and residuals r_i, via one
/// augmented exponential and resolvent per component. Throws DomainError
/// naming the component whose augmented generator is singular.
double master_moment(const CSPHModel& m, const MasterQuery& q);

/// Normalized size-biased Esscher density (numerator over the y=0 moment).
double sb_esscher_density(const CSPHModel& m, const std::array<int, 3>& n,
                          const std::array<double, 3>& theta,
                          const std::array<double, 3>& x);

}  // namespace csph
