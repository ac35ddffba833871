#pragma once

#include <Eigen/Dense>

namespace csph {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// e^A by Padé approximation with scaling and squaring (order-13 schedule,
/// 1-norm based order/scale selection). Does not assume diagonalizability.
Matrix mat_exp(const Matrix& a);

/// Kronecker product: block (i,j) of the result is a(i,j)*b.
Matrix kron_product(const Matrix& a, const Matrix& b);

/// Kronecker sum a⊗I + I⊗b for square a, b.
Matrix kron_sum(const Matrix& a, const Matrix& b);

/// Kronecker product of two column vectors as a vector.
Vector kron_vec(const Vector& a, const Vector& b);

/// ∫₀ᵘ e^{At} B e^{C(u−t)} dt, read off as the upper-right block of
/// exp([[A,B],[0,C]]·u).
Matrix van_loan_integral(const Matrix& a, const Matrix& b, const Matrix& c,
                         double u);

/// X with A·X = B via LU with partial pivoting. Throws SingularityError when
/// the smallest pivot falls below 1e-12·‖A‖∞.
Matrix solve_linear(const Matrix& a, const Matrix& b);

/// max over eigenvalues of Re(λ).
double spectral_abscissa(const Matrix& a);

/// ‖A‖∞ (maximum absolute row sum).
double norm_inf(const Matrix& a);

}  // namespace csph
