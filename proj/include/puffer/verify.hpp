#pragma once
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>
#include <puffer/linalg.hpp>
#include <puffer/penalties.hpp>
#include <puffer/solver.hpp>

namespace puffer::verify {

struct Problem
{
    Matrix x;
    Vector y;
    double sigma = 1.0;  // noise scale used to draw y
    std::uint64_t seed = 0;
};

// Deterministic in the seed.
using Generator = std::function<Problem(std::uint64_t seed)>;

namespace gen {

// n = 2p, p <= max_p, n <= max_n; X has orthonormal columns.
Generator orthonormal(Index max_n = 50, Index max_p = 20);

// Unit-variance columns with pairwise correlation rho.
Generator equicorrelated(double rho, Index n = 30, Index p = 6);

// Column norms spread over two orders of magnitude on top of mild correlation.
Generator heteroskedastic_gram(Index n = 30, Index p = 6);

// Prescribed singular spectrum, condition number `cond`.
Generator spiked_spectrum(double cond, Index n = 30, Index p = 6);

// Cycles through equicorrelated (rho in {0, .5, .9}), heteroskedastic-Gram and
// spiked-spectrum (cond up to 1e4) families by seed; n and p drawn per trial.
Generator full_rank_mix();

// p >= n designs, n <= max_n, p <= max_p.
Generator wide(Index max_n = 15, Index max_p = 40);

// 2 x 4 designs with strongly correlated column pairs.
Generator correlated_wide_small();

} // namespace gen

enum class TheoremId {
    lemma1,
    thm1,
    thm2,
    thm3_active,
    thm3_inactive,
    eq10_gap,
    // supplementary checks
    lemma2,
    thm1_general,
    thm2_general,
    solver_kkt,
};

std::string_view to_string(TheoremId id);

struct TheoremReport
{
    TheoremId id = TheoremId::lemma1;
    int trials = 0;
    double max_discrepancy = 0.0;
    double tolerance = 0.0;
    bool passed = true;                 // max_discrepancy <= tolerance
    std::uint64_t worst_case_seed = 0;

    long long comparisons = 0;          // coordinates / sets / pairs compared
    long long excluded = 0;             // boundary ties, non-converged fits
    std::string excluded_reason;
    long long multi_minimum_runs = 0;   // (problem, penalty, lambda) runs with >= 2 distinct minima

    // Negative control: a run that must NOT satisfy the identity.
    std::optional<double> control_discrepancy;
    double control_threshold = 0.0;
    bool control_passed = true;         // control_discrepancy > control_threshold

    // Independent first-order audit of every converged fit produced.
    long long kkt_checked = 0;
    long long kkt_failed = 0;
    double kkt_max_residual = 0.0;

    bool ok() const { return passed && control_passed; }
};

struct CheckOptions
{
    int trials = 200;
    std::uint64_t seed = 1;
    solver::SolverConfig solver;
    int threads = 0;  // 0: hardware concurrency capped by PUFFER_LASSO_THREADS
};

// Tolerance for every theorem-level identity: 10x the solver KKT tolerance.
inline double theorem_tolerance(const solver::SolverConfig& cfg) { return 10.0 * cfg.kkt_tol; }

/*
 * Lasso with the unhalved objective ||y - X b||^2 + lambda ||b||_1.
 * Equals solve(x, y, lambda / 2, lasso); the theorem identities
 * "Lasso(...) = t_lambda(...)" hold as lasso_unhalved(2 lambda) = t_lambda.
 */
solver::FitResult lasso_unhalved(const Matrix& x, const Vector& y, double lambda,
                                 const solver::SolverConfig& cfg = {});

// Soft thresholding of the OLS fit on orthonormal designs.
TheoremReport check_lemma1(const Generator& g, const CheckOptions& opt);

// Thresholding of beta_ols by the penalized fit on Puffer data. With a
// control generator, also runs the fit without Puffer on it and records the
// smallest mid-path discrepancy.
TheoremReport check_theorem1(const Generator& g, const CheckOptions& opt,
                             const PenaltySpec& pen = PenaltySpec::lasso(),
                             const Generator* control = nullptr);

// Active set on scaled-Puffer data vs |Z_j| > lambda sqrt(n)/sigma vs the
// p-value rule, plus the coefficient identity. The control runs the same
// comparison with plain Puffer data.
TheoremReport check_theorem2(const Generator& g, const CheckOptions& opt,
                             const PenaltySpec& pen = PenaltySpec::lasso(),
                             const Generator* control = nullptr);

// Active set at lambda = 1.96 sigma / sqrt(n) vs {j : p_j <= 0.05}.
TheoremReport check_pvalue_rule(const Generator& g, const CheckOptions& opt);

struct Theorem3Reports
{
    TheoremReport active;
    TheoremReport inactive;
};

// First-order identities relating every multistart local minimum on
// Puffer_tau data to ridge(tau).
Theorem3Reports check_theorem3(const Generator& g, const CheckOptions& opt,
                               const PenaltySpec& pen, double tau);

/*
 * max_j |P_0(b1 - b2)_j| <= lambda1 + lambda2 over every pair of distinct
 * local minima found on Puffer_0 data, across penalties and across the
 * lambda levels (fractions of ||X~'Y~||_inf).
 */
TheoremReport check_local_min_gap(const Generator& g, const CheckOptions& opt,
                                  const std::vector<PenaltySpec>& pens,
                                  const std::vector<double>& lambda_fracs = {0.1, 0.3});

// Both row-space / ridge identities for randomized (X, v, Y, tau).
TheoremReport check_lemma2(const CheckOptions& opt);

// Folds b into a: max discrepancy, summed counts, worst seed follows the max.
void merge_into(TheoremReport& a, const TheoremReport& b);

// Independent recomputation of the first-order residual from raw inputs.
double independent_kkt_residual(const Matrix& x, const Vector& y, const solver::FitResult& fit);

struct SuiteOptions
{
    std::uint64_t seed = 20140101;
    int trials = 200;   // base trial count; heavier checks scale down from it
    int threads = 0;
};

/*
 * Full harness: lemma1, thm1, thm2, thm3_active, thm3_inactive, eq10_gap,
 * then lemma2, thm1_general, thm2_general and solver_kkt.
 */
std::vector<TheoremReport> run_all(const SuiteOptions& opt);

// Worker count: `requested` if positive, else hardware concurrency; capped by
// PUFFER_LASSO_THREADS when set.
int resolve_threads(int requested);

} // namespace puffer::verify
