#include <puffer/preconditioners.hpp>
#include <puffer/errors.hpp>
#include <cmath>
#include <sstream>
#include <string>

namespace puffer::precond {

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

void require_tau(double tau, const char* where)
{
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw DomainError(std::string(where) + ": tau must be finite and nonnegative");
    }
}

[[noreturn]] void throw_rank(const char* where, const linalg::SvdFactors& f, Index needed)
{
    // first offending singular value
    Index i = 0;
    while (i < f.d.size() && f.d(i) > f.rank_tol) ++i;
    std::ostringstream msg;
    msg.precision(17);
    msg << where << ": rank " << i << " < " << needed << "; singular value d[" << i
        << "] = " << (i < f.d.size() ? f.d(i) : 0.0) << " is at or below tolerance " << f.rank_tol;
    throw RankError(msg.str());
}

// Left Puffer factors for a tall, full-column-rank matrix.
linalg::SvdFactors tall_factors(const Matrix& x, const char* where)
{
    if (x.rows() <= x.cols()) {
        throw RankError(std::string(where) + ": requires n>p (got n=" + std::to_string(x.rows())
                        + ", p=" + std::to_string(x.cols()) + ")");
    }
    auto f = linalg::svd(x, linalg::SvdMode::skinny);
    if (linalg::rank_of(f) < x.cols()) throw_rank(where, f, x.cols());
    return f;
}

// U diag(w) U' m, as three products so that no n x n matrix is formed.
Vector apply_sandwich(const Matrix& u, const Vector& w, const Vector& m)
{
    const Vector t = u.transpose() * m;
    return u * w.cwiseProduct(t);
}

Matrix apply_sandwich(const Matrix& u, const Vector& w, const Matrix& m)
{
    const Matrix t = u.transpose() * m;
    return u * (w.asDiagonal() * t);
}

} // namespace

std::string_view to_string(TransformKind t)
{
    switch (t) {
        case TransformKind::puffer: return "puffer";
        case TransformKind::puffer_scaled: return "puffer_scaled";
        case TransformKind::puffer_tau: return "puffer_tau";
    }
    return "unknown";
}

PreconditionedPair puffer(const Matrix& x, const Vector& y)
{
    require_shapes(x, y, "puffer");
    const auto f = tall_factors(x, "puffer");
    PreconditionedPair out;
    out.x_tilde = f.u * f.v.transpose();
    out.y_tilde = apply_sandwich(f.u, f.d.cwiseInverse(), y);
    out.transform = TransformKind::puffer;
    return out;
}

Vector scaling_matrix(const Matrix& x)
{
    return linalg::gram_inverse_diagonal(x).cwiseSqrt();
}

PreconditionedPair puffer_scaled(const Matrix& x, const Vector& y)
{
    require_shapes(x, y, "puffer_scaled");
    const Vector n_diag = scaling_matrix(x);
    const Matrix xn = x * n_diag.asDiagonal();
    const auto f = tall_factors(xn, "puffer_scaled");
    PreconditionedPair out;
    out.x_tilde = f.u * f.v.transpose();
    out.y_tilde = apply_sandwich(f.u, f.d.cwiseInverse(), y);
    out.transform = TransformKind::puffer_scaled;
    out.n_diag = n_diag;
    return out;
}

PreconditionedPair puffer_tau(const Matrix& x, const Vector& y, double tau)
{
    require_shapes(x, y, "puffer_tau");
    require_tau(tau, "puffer_tau");
    if (x.cols() < x.rows()) {
        throw InputError("puffer_tau: requires p>=n (got n=" + std::to_string(x.rows())
                         + ", p=" + std::to_string(x.cols()) + ")");
    }
    const auto f = linalg::svd(x, linalg::SvdMode::skinny);
    if (tau == 0.0 && linalg::rank_of(f) < x.rows()) throw_rank("puffer_tau(tau=0)", f, x.rows());

    // (d^2 + tau)^{-1/2}; zero singular values with tau > 0 simply scale by tau^{-1/2}
    const Vector w = (f.d.array().square() + tau).rsqrt().matrix();
    PreconditionedPair out;
    out.x_tilde = apply_sandwich(f.u, w, x);
    out.y_tilde = apply_sandwich(f.u, w, y);
    out.transform = TransformKind::puffer_tau;
    out.tau = tau;
    return out;
}

Vector project_rowspace(const Matrix& x, const Vector& v, double tau)
{
    linalg::require_finite(x, "project_rowspace");
    linalg::require_finite(v, "project_rowspace");
    require_tau(tau, "project_rowspace");
    if (v.size() != x.cols()) throw InputError("project_rowspace: v must have p entries");
    if (x.cols() < x.rows()) throw InputError("project_rowspace: requires p>=n");

    if (tau == 0.0) {
        const auto f = linalg::svd(x, linalg::SvdMode::skinny);
        if (linalg::rank_of(f) < x.rows()) throw_rank("project_rowspace(tau=0): X X' is singular;", f, x.rows());
    }
    Matrix g = x * x.transpose();
    g.diagonal().array() += tau;
    Eigen::LLT<Matrix> chol(g);
    if (chol.info() != Eigen::Success) {
        throw NumericalError("project_rowspace: X X' + tau I is not numerically positive definite");
    }
    const Vector w = chol.solve(x * v);
    return x.transpose() * w;
}

Vector ridge_via_precond(const Matrix& x, const Vector& y, double tau)
{
    const auto pair = puffer_tau(x, y, tau);
    return pair.x_tilde.transpose() * pair.y_tilde;
}

} // namespace puffer::precond
