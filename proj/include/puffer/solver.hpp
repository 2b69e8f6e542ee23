#pragma once
#include <cstdint>
#include <optional>
#include <vector>
#include <puffer/linalg.hpp>
#include <puffer/penalties.hpp>

namespace puffer::solver {

struct SolverConfig
{
    int max_iter = 10000;        // sweeps
    double coord_tol = 1e-10;    // max |delta beta_j| over a sweep
    double kkt_tol = 1e-7;
    int multistart_count = 8;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct FitResult
{
    Vector beta;
    double lambda = 0.0;
    PenaltySpec penalty;
    int iterations = 0;
    bool converged = false;
    double kkt_residual = 0.0;
    double objective = 0.0;
    std::vector<Index> active_set;
};

// 0.5 ||y - X b||^2 + lambda sum_j pen(b_j)
double objective(const Matrix& x, const Vector& y, const Vector& beta, double lambda,
                 const PenaltySpec& pen);

/*
 * Max violation of the first-order condition g - lambda dpen(beta) = 0 with
 * g = X'(y - X beta): |g_j - lambda pen'(beta_j)| on nonzero coordinates,
 * (|g_j| - lambda)^+ on zero coordinates.
 */
double kkt_residual(const Matrix& x, const Vector& y, const Vector& beta, double lambda,
                    const PenaltySpec& pen);

// ||X'y||_inf: smallest lambda at which zero solves the lasso.
double lambda_max(const Matrix& x, const Vector& y);

// `count` log-spaced values from hi down to hi * ratio.
Vector log_lambda_grid(double hi, int count, double ratio);

/*
 * Cyclic coordinate descent for argmin 0.5 ||y - X b||^2 + lambda sum_j pen(b_j)
 * with exact univariate updates. Starts from `init` (zero when absent).
 * Hitting max_iter returns with converged == false.
 */
FitResult solve(const Matrix& x, const Vector& y, double lambda, const PenaltySpec& pen,
                const std::optional<Vector>& init = std::nullopt,
                const SolverConfig& cfg = {});

// Warm-started sequence over a strictly descending, positive lambda grid.
std::vector<FitResult> solve_path(const Matrix& x, const Vector& y, const Vector& lambdas,
                                  const PenaltySpec& pen, const SolverConfig& cfg = {});

/*
 * Distinct stationary points reached from cfg.multistart_count random starts
 * drawn uniformly from [-s, s]^p, s = ||X'y||_inf. Convex penalties and
 * lambda == 0 give a single cold-started fit. Two fits are the same point when
 * ||b1 - b2||_inf <= 1e-5.
 */
std::vector<FitResult> multistart_local_minima(const Matrix& x, const Vector& y, double lambda,
                                               const PenaltySpec& pen,
                                               const SolverConfig& cfg = {});

inline constexpr double distinct_minimum_tol = 1e-5;

} // namespace puffer::solver
