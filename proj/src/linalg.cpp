#include "csph/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csph/errors.hpp"

namespace csph {

namespace {

void require_square(const Matrix& a, const char* who) {
    if (a.rows() != a.cols() || a.rows() < 1) {
        throw DimensionError(std::string(who) + ": expected a square matrix, got " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
}

void require_finite(const Matrix& a, const char* who) {
    if (!a.allFinite()) {
        throw NumericError(std::string(who) + ": non-finite entries in input");
    }
}

template <typename MatT>
double norm_1(const MatT& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

// Diagonal Padé approximant of e^A of order m, given precomputed even powers.
// pade_uv fills u (odd part, premultiplied by A) and v (even part).
template <typename MatT>
void pade_uv(const MatT& a, const MatT& a2, const double* b, int m, MatT& u,
             MatT& v) {
    const auto n = a.rows();
    MatT eu = MatT::Zero(n, n);
    MatT ev = MatT::Zero(n, n);
    MatT pw = MatT::Identity(n, n);  // A^0
    eu += b[1] * pw;
    ev += b[0] * pw;
    for (int k = 2; k <= m; k += 2) {
        pw = pw * a2;  // A^k
        ev += b[k] * pw;
        if (k + 1 <= m) eu += b[k + 1] * pw;
    }
    u = a * eu;
    v = std::move(ev);
}

template <typename MatT>
MatT pade13(const MatT& a, const MatT& a2, const MatT& a4, const MatT& a6) {
    static const double b[] = {64764752532480000.0, 32382376266240000.0,
                               7771770303897600.0,  1187353796428800.0,
                               129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,
                               1323241920.0,        40840800.0,
                               960960.0,            16380.0,
                               182.0,               1.0};
    const auto n = a.rows();
    const MatT i = MatT::Identity(n, n);
    MatT u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
                  b[5] * a4 + b[3] * a2 + b[1] * i);
    MatT v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
             b[2] * a2 + b[0] * i;
    return (v - u).partialPivLu().solve(v + u);
}

// Order thresholds from the standard scaling-and-squaring schedule.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <typename MatT>
MatT mat_exp_impl(const MatT& a) {
    static const double b3[] = {120.0, 60.0, 12.0, 1.0};
    static const double b5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
    static const double b7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                25200.0,    1512.0,    56.0,      1.0};
    static const double b9[] = {17643225600.0, 8821612800.0, 2075673600.0,
                                302702400.0,   30270240.0,   2162160.0,
                                110880.0,      3960.0,       90.0,
                                1.0};

    const double nrm = norm_1(a);
    MatT u, v;
    if (nrm <= kTheta9) {
        const MatT a2 = a * a;
        int m;
        const double* b;
        if (nrm <= kTheta3) {
            m = 3, b = b3;
        } else if (nrm <= kTheta5) {
            m = 5, b = b5;
        } else if (nrm <= kTheta7) {
            m = 7, b = b7;
        } else {
            m = 9, b = b9;
        }
        pade_uv(a, a2, b, m, u, v);
        MatT r = (v - u).partialPivLu().solve(v + u);
        if (!r.allFinite()) throw NumericError("mat_exp: overflow in Padé evaluation");
        return r;
    }

    int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / kTheta13))));
    const MatT as = a / std::exp2(static_cast<double>(squarings));
    const MatT a2 = as * as;
    const MatT a4 = a2 * a2;
    const MatT a6 = a4 * a2;
    MatT r = pade13(as, a2, a4, a6);
    for (int k = 0; k < squarings; ++k) r = r * r;
    if (!r.allFinite()) throw NumericError("mat_exp: overflow after squaring phase");
    return r;
}

// Stack-allocated variant for the small generators that dominate evaluation.
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>;

}  // namespace

double norm_inf(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

Matrix mat_exp(const Matrix& a) {
    require_square(a, "mat_exp");
    require_finite(a, "mat_exp");
    if (a.rows() <= 8) {
        const SmallMatrix small = a;
        return mat_exp_impl(small);
    }
    return mat_exp_impl(a);
}

Matrix kron_product(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix kron_sum(const Matrix& a, const Matrix& b) {
    require_square(a, "kron_sum");
    require_square(b, "kron_sum");
    return kron_product(a, Matrix::Identity(b.rows(), b.rows())) +
           kron_product(Matrix::Identity(a.rows(), a.rows()), b);
}

Vector kron_vec(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

Matrix van_loan_integral(const Matrix& a, const Matrix& b, const Matrix& c,
                         double u) {
    require_square(a, "van_loan_integral");
    require_square(c, "van_loan_integral");
    if (b.rows() != a.rows() || b.cols() != c.rows()) {
        throw DimensionError(
            "van_loan_integral: B must be " + std::to_string(a.rows()) + "x" +
            std::to_string(c.rows()) + ", got " + std::to_string(b.rows()) + "x" +
            std::to_string(b.cols()));
    }
    if (u < 0.0) throw DomainError("van_loan_integral: u must be nonnegative");
    const auto p = a.rows(), q = c.rows();
    Matrix block = Matrix::Zero(p + q, p + q);
    block.topLeftCorner(p, p) = a;
    block.topRightCorner(p, q) = b;
    block.bottomRightCorner(q, q) = c;
    return mat_exp(block * u).topRightCorner(p, q);
}

Matrix solve_linear(const Matrix& a, const Matrix& b) {
    require_square(a, "solve_linear");
    if (b.rows() != a.rows()) {
        throw DimensionError("solve_linear: RHS has " + std::to_string(b.rows()) +
                             " rows, expected " + std::to_string(a.rows()));
    }
    Eigen::PartialPivLU<Matrix> lu(a);
    const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(min_pivot > 1e-12 * norm_inf(a))) {
        throw SingularityError("solve_linear: pivot " + std::to_string(min_pivot) +
                               " below threshold for matrix of inf-norm " +
                               std::to_string(norm_inf(a)));
    }
    return lu.solve(b);
}

double spectral_abscissa(const Matrix& a) {
    require_square(a, "spectral_abscissa");
    require_finite(a, "spectral_abscissa");
    Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw NumericError("spectral_abscissa: QR iteration did not converge");
    }
    return es.eigenvalues().real().maxCoeff();
}

}  // namespace csph
