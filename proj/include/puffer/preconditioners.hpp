#pragma once
#include <optional>
#include <string_view>
#include <puffer/linalg.hpp>

namespace puffer::precond {

enum class TransformKind { puffer, puffer_scaled, puffer_tau };

std::string_view to_string(TransformKind t);

struct PreconditionedPair
{
    Matrix x_tilde;
    Vector y_tilde;
    TransformKind transform = TransformKind::puffer;
    double tau = 0.0;              // puffer_tau only
    std::optional<Vector> n_diag;  // puffer_scaled only
};

// F = U D^{-1} U' from the skinny SVD of X; returns (F X, F Y) = (U V', F Y).
// Requires n > p and full column rank.
PreconditionedPair puffer(const Matrix& x, const Vector& y);

// Diagonal of N: sqrt of the diagonal of (X'X)^{-1}.
Vector scaling_matrix(const Matrix& x);

// Puffer applied to X N: (F_N X N, F_N Y). Coefficients live in N^{-1} beta units.
PreconditionedPair puffer_scaled(const Matrix& x, const Vector& y);

// F_tau = U (D^2 + tau I)^{-1/2} U'; returns (F_tau X, F_tau Y).
// Requires p >= n; tau == 0 additionally requires full row rank.
PreconditionedPair puffer_tau(const Matrix& x, const Vector& y, double tau);

// X' (X X' + tau I)^{-1} X v. Requires p >= n; X X' must be invertible at tau == 0.
Vector project_rowspace(const Matrix& x, const Vector& v, double tau);

// (F_tau X)' F_tau Y.
Vector ridge_via_precond(const Matrix& x, const Vector& y, double tau);

} // namespace puffer::precond
