#pragma once
// Slow, independent reference computations for the unit tests. Nothing here
// calls into the library.
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix random_matrix(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = nd(rng);
    return m;
}

inline Vector random_vector(std::uint64_t seed, Eigen::Index size)
{
    return random_matrix(seed, size, 1).col(0);
}

// Gaussian elimination with partial pivoting; solves A X = B.
inline Matrix gauss_solve(Matrix a, Matrix b)
{
    const auto n = a.rows();
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index piv = k;
        for (Eigen::Index i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) throw std::runtime_error("gauss_solve: singular");
        a.row(k).swap(a.row(piv));
        b.row(k).swap(b.row(piv));
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            for (Eigen::Index j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
        }
    }
    Matrix x(n, b.cols());
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            double s = b(i, j);
            for (Eigen::Index k = i + 1; k < n; ++k) s -= a(i, k) * x(k, j);
            x(i, j) = s / a(i, i);
        }
    }
    return x;
}

inline Matrix gauss_inverse(const Matrix& a)
{
    return gauss_solve(a, Matrix::Identity(a.rows(), a.cols()));
}

inline Matrix naive_mul(const Matrix& a, const Matrix& b)
{
    Matrix c = Matrix::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j)
            for (Eigen::Index k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
    return c;
}

// Cyclic Jacobi rotations on a symmetric matrix; eigenvalues, descending.
inline Vector jacobi_eigenvalues(Matrix a)
{
    const auto n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return Eigen::Map<Vector>(ev.data(), n);
}

// Singular values via eigenvalues of the smaller Gram matrix.
inline Vector singular_values(const Matrix& x)
{
    const Matrix g = x.rows() >= x.cols() ? naive_mul(x.transpose(), x) : naive_mul(x, x.transpose());
    Vector ev = jacobi_eigenvalues(g);
    return ev.cwiseMax(0.0).cwiseSqrt();
}

// Phi(x) = 1/2 + phi(x) sum_k x^{2k+1} / (1 3 5 ... (2k+1)).
inline double normal_cdf_series(double x)
{
    const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    double term = x, sum = x;
    for (int k = 1; k < 500; ++k) {
        term *= x * x / (2.0 * k + 1.0);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return 0.5 + phi * sum;
}

// Composite Simpson rule with `panels` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 2000)
{
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

inline double central_difference(const std::function<double(double)>& f, double x, double h)
{
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// argmin of f over lo, lo + step, ..., hi.
inline double grid_argmin(const std::function<double(double)>& f, double lo, double hi, double step)
{
    double best = lo, best_f = f(lo);
    const auto n = static_cast<long>(std::floor((hi - lo) / step));
    for (long i = 1; i <= n; ++i) {
        const double b = lo + static_cast<double>(i) * step;
        const double fb = f(b);
        if (fb < best_f) {
            best_f = fb;
            best = b;
        }
    }
    return best;
}

// FISTA on 0.5 ||y - X b||^2 + lambda ||b||_1.
inline Vector lasso_proximal_gradient(const Matrix& x, const Vector& y, double lambda, int iters = 200000)
{
    const double lip = jacobi_eigenvalues(naive_mul(x.transpose(), x))(0);
    const double step = 1.0 / lip;
    Vector b = Vector::Zero(x.cols()), prev = b, z = b;
    double t = 1.0;
    for (int it = 0; it < iters; ++it) {
        const Vector grad = x.transpose() * (x * z - y);
        Vector next = z - step * grad;
        for (Eigen::Index j = 0; j < next.size(); ++j) {
            const double v = next(j);
            next(j) = (v > 0 ? 1.0 : -1.0) * std::max(std::abs(v) - step * lambda, 0.0);
        }
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        z = next + ((t - 1.0) / tn) * (next - b);
        prev = b;
        b = next;
        t = tn;
        if (it > 100 && (b - prev).cwiseAbs().maxCoeff() < 1e-15) break;
    }
    return b;
}

inline double lasso_objective(const Matrix& x, const Vector& y, const Vector& b, double lambda)
{
    return 0.5 * (y - x * b).squaredNorm() + lambda * b.cwiseAbs().sum();
}

} // namespace oracle
