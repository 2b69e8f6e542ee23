#include <puffer/verify.hpp>
#include <puffer/linalg.hpp>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace puffer::verify::gen {

namespace {

using Rng = std::mt19937_64;

Matrix gaussian(Rng& rng, Index rows, Index cols)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
    return m;
}

Vector gaussian(Rng& rng, Index size)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    Vector v(size);
    for (Index i = 0; i < size; ++i) v(i) = nd(rng);
    return v;
}

Index uniform_index(Rng& rng, Index lo, Index hi)
{
    return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

Matrix orthonormal_columns(Rng& rng, Index rows, Index cols)
{
    const Matrix g = gaussian(rng, rows, cols);
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(rows, cols);
}

// x_ij = sqrt(1 - rho) e_ij + sqrt(rho) f_i
Matrix equicorrelated_design(Rng& rng, double rho, Index n, Index p)
{
    const Matrix e = gaussian(rng, n, p);
    const Vector f = gaussian(rng, n);
    Matrix x = std::sqrt(1.0 - rho) * e;
    x.colwise() += std::sqrt(rho) * f;
    return x;
}

/*
 * beta_j = sigma sqrt(nu_j / n) zeta_j, so that the OLS test statistic of
 * coordinate j is roughly zeta_j + N(0, 1). About a third of the zeta_j are
 * zero; the rest spread over a few standard errors.
 */
Problem finish_full_rank(Rng& rng, Matrix x, std::uint64_t seed)
{
    const Index n = x.rows(), p = x.cols();
    const double sigma = 1.0;
    const Vector nu = linalg::gram_inverse_diagonal(x);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    Vector beta(p);
    for (Index j = 0; j < p; ++j) {
        const double zeta = u01(rng) < 0.35 ? 0.0 : 4.0 * (2.0 * u01(rng) - 1.0);
        beta(j) = sigma * std::sqrt(nu(j) / static_cast<double>(n)) * zeta;
    }
    Problem prob;
    prob.y = x * beta + sigma * gaussian(rng, n);
    prob.x = std::move(x);
    prob.sigma = sigma;
    prob.seed = seed;
    return prob;
}

Matrix heteroskedastic_design(Rng& rng, Index n, Index p)
{
    Matrix x = equicorrelated_design(rng, 0.3, n, p);
    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (Index j = 0; j < p; ++j) {
        const double frac = p > 1 ? static_cast<double>(order[static_cast<std::size_t>(j)]) / (p - 1) : 0.0;
        x.col(j) *= std::pow(10.0, 2.0 * frac - 1.0);  // norms from 0.1 to 10 per unit variance
    }
    return x;
}

Matrix spiked_design(Rng& rng, double cond, Index n, Index p)
{
    const Matrix u = orthonormal_columns(rng, n, p);
    const Matrix v = orthonormal_columns(rng, p, p);
    Vector d(p);
    for (Index i = 0; i < p; ++i) {
        const double frac = p > 1 ? static_cast<double>(i) / (p - 1) : 0.0;
        d(i) = std::sqrt(static_cast<double>(n)) * std::pow(cond, -frac);
    }
    return u * d.asDiagonal() * v.transpose();
}

} // namespace

Generator orthonormal(Index max_n, Index max_p)
{
    return [max_n, max_p](std::uint64_t seed) {
        Rng rng(seed);
        const Index p = uniform_index(rng, 1, std::min(max_p, max_n / 2));
        const Index n = 2 * p;
        Problem prob;
        prob.x = orthonormal_columns(rng, n, p);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        Vector beta(p);
        for (Index j = 0; j < p; ++j) beta(j) = u01(rng) < 0.3 ? 0.0 : 3.0 * (2.0 * u01(rng) - 1.0);
        prob.sigma = 0.5;
        prob.y = prob.x * beta + prob.sigma * gaussian(rng, n);
        prob.seed = seed;
        return prob;
    };
}

Generator equicorrelated(double rho, Index n, Index p)
{
    return [rho, n, p](std::uint64_t seed) {
        Rng rng(seed);
        return finish_full_rank(rng, equicorrelated_design(rng, rho, n, p), seed);
    };
}

Generator heteroskedastic_gram(Index n, Index p)
{
    return [n, p](std::uint64_t seed) {
        Rng rng(seed);
        return finish_full_rank(rng, heteroskedastic_design(rng, n, p), seed);
    };
}

Generator spiked_spectrum(double cond, Index n, Index p)
{
    return [cond, n, p](std::uint64_t seed) {
        Rng rng(seed);
        return finish_full_rank(rng, spiked_design(rng, cond, n, p), seed);
    };
}

Generator full_rank_mix()
{
    return [](std::uint64_t seed) {
        Rng rng(seed);
        const Index p = uniform_index(rng, 2, 10);
        const Index n = uniform_index(rng, p + 3, 40);
        Matrix x;
        switch (seed % 5) {
            case 0: x = equicorrelated_design(rng, 0.0, n, p); break;
            case 1: x = equicorrelated_design(rng, 0.5, n, p); break;
            case 2: x = equicorrelated_design(rng, 0.9, n, p); break;
            case 3: x = heteroskedastic_design(rng, n, p); break;
            default: {
                const double cond = std::pow(10.0, static_cast<double>(uniform_index(rng, 1, 4)));
                x = spiked_design(rng, cond, n, p);
            }
        }
        return finish_full_rank(rng, std::move(x), seed);
    };
}

Generator wide(Index max_n, Index max_p)
{
    return [max_n, max_p](std::uint64_t seed) {
        Rng rng(seed);
        const Index n = uniform_index(rng, 2, max_n);
        const Index p = uniform_index(rng, n, std::max(n, max_p));
        const double rho = (seed % 2 == 0) ? 0.0 : 0.5;
        Problem prob;
        prob.x = equicorrelated_design(rng, rho, n, p);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        Vector beta = Vector::Zero(p);
        for (Index j = 0; j < p; ++j) {
            if (u01(rng) < 0.2) beta(j) = 2.0 * (2.0 * u01(rng) - 1.0);
        }
        prob.sigma = 0.5;
        prob.y = prob.x * beta + prob.sigma * gaussian(rng, n);
        prob.seed = seed;
        return prob;
    };
}

Generator correlated_wide_small()
{
    return [](std::uint64_t seed) {
        Rng rng(seed);
        const Matrix base = gaussian(rng, 2, 2);
        const Matrix noise = gaussian(rng, 2, 2);
        Problem prob;
        prob.x.resize(2, 4);
        prob.x.col(0) = base.col(0);
        prob.x.col(1) = base.col(0) + 0.2 * noise.col(0);
        prob.x.col(2) = base.col(1);
        prob.x.col(3) = base.col(1) + 0.2 * noise.col(1);
        prob.y = gaussian(rng, 2) * 2.0;
        prob.sigma = 1.0;
        prob.seed = seed;
        return prob;
    };
}

} // namespace puffer::verify::gen
