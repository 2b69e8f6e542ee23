#include <puffer/linalg.hpp>
#include <puffer/errors.hpp>
#include <algorithm>
#include <limits>
#include <sstream>
#include <string>

namespace puffer::linalg {

void require_finite(const Matrix& x, std::string_view what)
{
    if (x.size() == 0) {
        throw InputError(std::string(what) + ": empty matrix");
    }
    if (!x.allFinite()) {
        throw InputError(std::string(what) + ": non-finite entry");
    }
}

void require_finite(const Vector& x, std::string_view what)
{
    if (x.size() == 0) {
        throw InputError(std::string(what) + ": empty vector");
    }
    if (!x.allFinite()) {
        throw InputError(std::string(what) + ": non-finite entry");
    }
}

double rank_tolerance(Index rows, Index cols, double d_max)
{
    return static_cast<double>(std::max(rows, cols))
        * std::numeric_limits<double>::epsilon() * d_max;
}

SvdFactors svd(const Matrix& x, SvdMode mode)
{
    require_finite(x, "svd");

    const unsigned opts = (mode == SvdMode::skinny)
        ? (Eigen::ComputeThinU | Eigen::ComputeThinV)
        : (Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::JacobiSVD<Matrix> dec(x, opts);

    SvdFactors f;
    f.u = dec.matrixU();
    f.d = dec.singularValues();
    f.v = dec.matrixV();
    f.mode = mode;
    f.rows = x.rows();
    f.cols = x.cols();

    if (!f.u.allFinite() || !f.d.allFinite() || !f.v.allFinite()) {
        throw NumericalError("svd: decomposition produced non-finite factors");
    }
    f.rank_tol = rank_tolerance(f.rows, f.cols, f.d.size() ? f.d(0) : 0.0);
    return f;
}

Index rank_of(const SvdFactors& f)
{
    return static_cast<Index>((f.d.array() > f.rank_tol).count());
}

Matrix pseudoinverse_gram(const Matrix& x)
{
    const auto f = svd(x, SvdMode::skinny);
    Vector inv2(f.d.size());
    for (Index i = 0; i < f.d.size(); ++i) {
        inv2(i) = f.d(i) > f.rank_tol ? 1.0 / (f.d(i) * f.d(i)) : 0.0;
    }
    return f.v * inv2.asDiagonal() * f.v.transpose();
}

Vector gram_inverse_diagonal(const Matrix& x)
{
    if (x.rows() <= x.cols()) {
        throw RankError("gram_inverse_diagonal: requires n > p (got n=" + std::to_string(x.rows())
                        + ", p=" + std::to_string(x.cols()) + ")");
    }
    const auto f = svd(x, SvdMode::skinny);
    const Index r = rank_of(f);
    if (r < x.cols()) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "gram_inverse_diagonal: X is rank deficient (rank " << r << " < p=" << x.cols()
            << ", smallest singular value " << f.d(f.d.size() - 1) << ")";
        throw RankError(msg.str());
    }
    // nu_j = sum_k V_jk^2 / d_k^2
    const Vector inv2 = f.d.array().square().inverse();
    return f.v.array().square().matrix() * inv2;
}

} // namespace puffer::linalg
