#include <puffer/estimators.hpp>
#include <puffer/errors.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace puffer::estimators {

namespace {

void require_shapes(const Matrix& x, const Vector& y, const char* where)
{
    linalg::require_finite(x, where);
    linalg::require_finite(y, where);
    if (y.size() != x.rows()) {
        throw InputError(std::string(where) + ": y has " + std::to_string(y.size())
                         + " entries but X has " + std::to_string(x.rows()) + " rows");
    }
}

linalg::SvdFactors full_column_rank_svd(const Matrix& x, const char* where)
{
    if (x.rows() < x.cols()) {
        throw RankError(std::string(where) + ": requires n>=p (got n=" + std::to_string(x.rows())
                        + ", p=" + std::to_string(x.cols()) + ")");
    }
    auto f = linalg::svd(x, linalg::SvdMode::skinny);
    if (linalg::rank_of(f) < x.cols()) {
        std::ostringstream msg;
        msg.precision(17);
        msg << where << ": X is not full column rank (smallest singular value "
            << f.d(f.d.size() - 1) << ", tolerance " << f.rank_tol << ")";
        throw RankError(msg.str());
    }
    return f;
}

} // namespace

Vector ols(const Matrix& x, const Vector& y)
{
    require_shapes(x, y, "ols");
    const auto f = full_column_rank_svd(x, "ols");
    const Vector uty = f.u.transpose() * y;
    return f.v * uty.cwiseQuotient(f.d);
}

Vector ridge(const Matrix& x, const Vector& y, double tau)
{
    require_shapes(x, y, "ridge");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("ridge: tau must be finite and nonnegative");
    // V diag(d / (d^2 + tau)) U' y; directions with d_i <= rank_tol carry no
    // signal and are dropped, which gives the minimum-norm solution at tau = 0.
    const auto f = linalg::svd(x, linalg::SvdMode::skinny);
    const Vector uty = f.u.transpose() * y;
    Vector coef(f.d.size());
    for (Index i = 0; i < f.d.size(); ++i) {
        const double d = f.d(i);
        coef(i) = d > f.rank_tol ? d * uty(i) / (d * d + tau) : 0.0;
    }
    return f.v * coef;
}

Vector z_stats(const Matrix& x, const Vector& y, double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("z_stats: sigma must be positive");
    const Vector beta = ols(x, y);
    const Vector nu = linalg::gram_inverse_diagonal(x);
    const double rn = std::sqrt(static_cast<double>(x.rows()));
    return (rn * beta.array() / (sigma * nu.array().sqrt())).matrix();
}

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

Vector p_values(const Vector& z)
{
    if (!z.allFinite()) throw InputError("p_values: non-finite statistic");
    // 2 (1 - Phi(|z|)) = erfc(|z| / sqrt 2), without cancellation in the tail
    return z.unaryExpr([](double v) { return std::erfc(std::abs(v) / std::sqrt(2.0)); });
}

double sigma_hat(const Matrix& x, const Vector& y)
{
    require_shapes(x, y, "sigma_hat");
    if (x.rows() <= x.cols() + 1) {
        throw InputError("sigma_hat: insufficient degrees of freedom (requires n>p+1, got n="
                         + std::to_string(x.rows()) + ", p=" + std::to_string(x.cols()) + ")");
    }
    const Vector beta = ols(x, y);
    const double rss = (y - x * beta).squaredNorm();
    return std::sqrt(rss / static_cast<double>(x.rows() - x.cols()));
}

const char* to_string(SigmaSource s)
{
    return s == SigmaSource::user_supplied ? "user_supplied" : "residual_estimate";
}

InferenceResult infer(const Matrix& x, const Vector& y, std::optional<double> sigma)
{
    InferenceResult r;
    r.beta_ols = ols(x, y);
    if (sigma) {
        r.sigma = *sigma;
        r.sigma_source = SigmaSource::user_supplied;
    } else {
        r.sigma = sigma_hat(x, y);
        r.sigma_source = SigmaSource::residual_estimate;
        if (!(r.sigma > 64.0 * std::numeric_limits<double>::epsilon() * y.norm())) {
            throw NumericalError("infer: residual sigma estimate is zero (y lies in the column span)");
        }
    }
    r.z_stats = z_stats(x, y, r.sigma);
    r.p_values = p_values(r.z_stats);
    return r;
}

} // namespace puffer::estimators
