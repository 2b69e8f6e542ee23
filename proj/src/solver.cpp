#include <puffer/solver.hpp>
#include <puffer/errors.hpp>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace puffer::solver {

namespace {

void require_problem(const Matrix& x, const Vector& y, double lambda, const PenaltySpec& pen)
{
    linalg::require_finite(x, "solve");
    linalg::require_finite(y, "solve");
    if (y.size() != x.rows()) {
        throw InputError("solve: y has " + std::to_string(y.size()) + " entries but X has "
                         + std::to_string(x.rows()) + " rows");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("solve: lambda must be finite and nonnegative");
    }
    pen.validate();
}

double kkt_from_gradient(const Vector& g, const Vector& beta, double lambda, const PenaltySpec& pen)
{
    double worst = 0.0;
    for (Index j = 0; j < beta.size(); ++j) {
        double v;
        if (beta(j) != 0.0) {
            v = std::abs(g(j) - lambda * pen_derivative(pen, beta(j), lambda));
        } else {
            v = std::max(std::abs(g(j)) - lambda, 0.0);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

std::vector<Index> support(const Vector& beta)
{
    std::vector<Index> s;
    for (Index j = 0; j < beta.size(); ++j) {
        if (beta(j) != 0.0) s.push_back(j);
    }
    return s;
}

} // namespace

void SolverConfig::validate() const
{
    if (max_iter < 1) throw InputError("solver config: max_iter must be >= 1");
    if (!(coord_tol > 0.0)) throw InputError("solver config: coord_tol must be positive");
    if (!(kkt_tol > 0.0)) throw InputError("solver config: kkt_tol must be positive");
    if (multistart_count < 1) throw InputError("solver config: multistart_count must be >= 1");
}

double objective(const Matrix& x, const Vector& y, const Vector& beta, double lambda,
                 const PenaltySpec& pen)
{
    double penalty = 0.0;
    for (Index j = 0; j < beta.size(); ++j) penalty += pen_value(pen, beta(j), lambda);
    return 0.5 * (y - x * beta).squaredNorm() + lambda * penalty;
}

double kkt_residual(const Matrix& x, const Vector& y, const Vector& beta, double lambda,
                    const PenaltySpec& pen)
{
    const Vector g = x.transpose() * (y - x * beta);
    return kkt_from_gradient(g, beta, lambda, pen);
}

double lambda_max(const Matrix& x, const Vector& y)
{
    return (x.transpose() * y).cwiseAbs().maxCoeff();
}

Vector log_lambda_grid(double hi, int count, double ratio)
{
    if (!(hi > 0.0) || count < 1 || !(ratio > 0.0 && ratio < 1.0)) {
        throw InputError("log_lambda_grid: need hi > 0, count >= 1, ratio in (0, 1)");
    }
    Vector grid(count);
    if (count == 1) {
        grid(0) = hi;
        return grid;
    }
    for (int k = 0; k < count; ++k) {
        grid(k) = hi * std::pow(ratio, static_cast<double>(k) / (count - 1));
    }
    return grid;
}

FitResult solve(const Matrix& x, const Vector& y, double lambda, const PenaltySpec& pen,
                const std::optional<Vector>& init, const SolverConfig& cfg)
{
    require_problem(x, y, lambda, pen);
    cfg.validate();
    const Index p = x.cols();

    Vector beta = Vector::Zero(p);
    if (init) {
        if (init->size() != p) throw InputError("solve: init must have p entries");
        if (!init->allFinite()) throw InputError("solve: init has a non-finite entry");
        beta = *init;
    }
    const Vector col_sq = x.colwise().squaredNorm().transpose();
    Vector r = y - x * beta;

    FitResult fit;
    fit.lambda = lambda;
    fit.penalty = pen;

    int iter = 0;
    while (iter < cfg.max_iter) {
        ++iter;
        double max_change = 0.0;
        for (Index j = 0; j < p; ++j) {
            const double c = col_sq(j);
            const double old = beta(j);
            double next = 0.0;
            if (c > 0.0) {
                const double z = old + x.col(j).dot(r) / c;
                next = scaled_threshold(pen, z, lambda / c, lambda);
            }
            const double delta = next - old;
            if (delta != 0.0) {
                r.noalias() -= delta * x.col(j);
                beta(j) = next;
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        if (max_change < cfg.coord_tol) {
            r = y - x * beta;  // drop accumulated update error before judging
            const double kkt = kkt_from_gradient(x.transpose() * r, beta, lambda, pen);
            if (kkt <= cfg.kkt_tol) {
                fit.converged = true;
                fit.kkt_residual = kkt;
                break;
            }
        }
    }
    fit.iterations = iter;
    if (!fit.converged) fit.kkt_residual = kkt_residual(x, y, beta, lambda, pen);
    fit.objective = objective(x, y, beta, lambda, pen);
    fit.active_set = support(beta);
    fit.beta = std::move(beta);
    return fit;
}

std::vector<FitResult> solve_path(const Matrix& x, const Vector& y, const Vector& lambdas,
                                  const PenaltySpec& pen, const SolverConfig& cfg)
{
    for (Index k = 0; k < lambdas.size(); ++k) {
        if (!(lambdas(k) > 0.0) || !std::isfinite(lambdas(k))) {
            throw DomainError("solve_path: lambdas must be positive and finite");
        }
        if (k > 0 && !(lambdas(k) < lambdas(k - 1))) {
            throw DomainError("solve_path: lambdas must be strictly descending");
        }
    }
    std::vector<FitResult> path;
    path.reserve(static_cast<std::size_t>(lambdas.size()));
    std::optional<Vector> warm;
    for (Index k = 0; k < lambdas.size(); ++k) {
        path.push_back(solve(x, y, lambdas(k), pen, warm, cfg));
        warm = path.back().beta;
    }
    return path;
}

std::vector<FitResult> multistart_local_minima(const Matrix& x, const Vector& y, double lambda,
                                               const PenaltySpec& pen, const SolverConfig& cfg)
{
    require_problem(x, y, lambda, pen);
    cfg.validate();
    if (pen.convex() || lambda == 0.0) {
        return {solve(x, y, lambda, pen, std::nullopt, cfg)};
    }

    const double scale = lambda_max(x, y);
    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> unif(-scale, scale);

    std::vector<FitResult> minima;
    for (int k = 0; k < cfg.multistart_count; ++k) {
        Vector init(x.cols());
        for (Index j = 0; j < init.size(); ++j) init(j) = unif(rng);
        auto fit = solve(x, y, lambda, pen, init, cfg);
        const bool seen = std::any_of(minima.begin(), minima.end(), [&](const FitResult& m) {
            return (m.beta - fit.beta).cwiseAbs().maxCoeff() <= distinct_minimum_tol;
        });
        if (!seen) minima.push_back(std::move(fit));
    }
    return minima;
}

} // namespace puffer::solver
