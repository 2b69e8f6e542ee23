#pragma once
#include <Eigen/Dense>
#include <string_view>

namespace puffer {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace linalg {

enum class SvdMode { skinny, full };

/*
 * X = U diag(d) V'.
 *
 * skinny: u is n x k, v is p x k, k = min(n, p).
 * full:   u is n x n, v is p x p; d still holds the min(n, p) singular values,
 *         which sit on the diagonal of the n x p middle factor.
 */
struct SvdFactors
{
    Matrix u;
    Vector d;
    Matrix v;
    SvdMode mode = SvdMode::skinny;
    double rank_tol = 0.0;
    Index rows = 0;
    Index cols = 0;
};

// Throws InputError if x is empty or holds a non-finite entry.
void require_finite(const Matrix& x, std::string_view what);
void require_finite(const Vector& x, std::string_view what);

// Numerical rank tolerance: max(n, p) * eps * d_max.
double rank_tolerance(Index rows, Index cols, double d_max);

SvdFactors svd(const Matrix& x, SvdMode mode = SvdMode::skinny);

// Count of singular values strictly above f.rank_tol.
Index rank_of(const SvdFactors& f);

// (X'X)^+ = V diag(d^-2) V', singular values at or below rank_tol dropped.
Matrix pseudoinverse_gram(const Matrix& x);

// Diagonal of (X'X)^{-1}. Requires n > p and full column rank.
Vector gram_inverse_diagonal(const Matrix& x);

} // namespace linalg
} // namespace puffer
