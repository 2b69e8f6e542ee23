#pragma once
#include <optional>
#include <puffer/linalg.hpp>

namespace puffer::estimators {

// (X'X)^{-1} X'Y. Requires full column rank (n >= p).
Vector ols(const Matrix& x, const Vector& y);

/*
 * (X'X + tau I)^{-1} X'Y for tau > 0. At tau == 0 this is the Moore-Penrose
 * estimator (X'X)^+ X'Y, i.e. the minimum-norm least-squares solution.
 */
Vector ridge(const Matrix& x, const Vector& y, double tau);

// Z_j = sqrt(n) beta_j / sqrt(sigma^2 [(X'X)^{-1}]_jj).
Vector z_stats(const Matrix& x, const Vector& y, double sigma);

// Standard normal cdf, evaluated through erfc.
double normal_cdf(double z);

// 2 (1 - Phi(|z_j|)).
Vector p_values(const Vector& z);

// sqrt(RSS / (n - p)) of the OLS fit. Requires n > p + 1. Returns 0 when
// Y lies in the column span.
double sigma_hat(const Matrix& x, const Vector& y);

enum class SigmaSource { user_supplied, residual_estimate };

const char* to_string(SigmaSource s);

struct InferenceResult
{
    Vector beta_ols;
    Vector z_stats;
    Vector p_values;
    double sigma = 0.0;
    SigmaSource sigma_source = SigmaSource::user_supplied;
};

// Uses sigma when given, otherwise sigma_hat. A zero residual estimate is a
// degenerate fit and raises NumericalError.
InferenceResult infer(const Matrix& x, const Vector& y, std::optional<double> sigma = std::nullopt);

} // namespace puffer::estimators
