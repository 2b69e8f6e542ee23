#pragma once
#include <string>
#include <string_view>

namespace puffer {

enum class PenaltyKind { lasso, elastic_net, scad, mcp };

/**
 * A regular sparse penalty: symmetric, nondecreasing in |b|, differentiable
 * away from zero, with |pen'(b)| -> 1 as b -> 0.
 *
 * The penalized objective is lambda * sum_j pen(b_j). For scad and mcp the
 * knots of pen are placed in units of the same lambda, so that
 * lambda * pen(b) is the usual SCAD / MC+ penalty p_lambda(b):
 *
 *   lasso        pen(b) = |b|
 *   elastic_net  pen(b) = |b| + param * b^2 / 2                (param = alpha in (0, 1])
 *   scad         pen'(b) = 1 on |b| <= lambda,
 *                (a lambda - |b|) / ((a - 1) lambda) up to a lambda, then 0   (param = a > 2)
 *   mcp          pen'(b) = 1 - |b| / (gamma lambda) up to gamma lambda, then 0  (param = gamma > 1)
 */
struct PenaltySpec
{
    PenaltyKind kind = PenaltyKind::lasso;
    double param = 0.0;

    static PenaltySpec lasso() { return {PenaltyKind::lasso, 0.0}; }
    static PenaltySpec elastic_net(double alpha) { return {PenaltyKind::elastic_net, alpha}; }
    static PenaltySpec scad(double a = 3.7) { return {PenaltyKind::scad, a}; }
    static PenaltySpec mcp(double gamma = 3.0) { return {PenaltyKind::mcp, gamma}; }

    // Throws DomainError when param is outside the admissible range.
    void validate() const;

    // Concave on (0, inf): lasso, scad, mcp.
    bool concave() const { return kind != PenaltyKind::elastic_net; }
    bool convex() const { return kind == PenaltyKind::lasso || kind == PenaltyKind::elastic_net; }

    friend bool operator==(const PenaltySpec&, const PenaltySpec&) = default;
};

std::string_view to_string(PenaltyKind kind);

// Accepts "lasso", "enet"/"elastic_net", "scad", "mcp". Uses the default
// shape parameter when param is not given. Throws InputError on unknown names.
PenaltySpec parse_penalty(std::string_view name, const double* param = nullptr);

double soft_threshold(double x, double lambda);

double pen_value(const PenaltySpec& pen, double x, double lambda);

// Throws DomainError at x == 0.
double pen_derivative(const PenaltySpec& pen, double x, double lambda);

/*
 * Global minimizer over b of 0.5 (b - z)^2 + weight * pen(b), with the knots
 * of pen placed at scale `lambda`. Coordinate descent uses
 * weight = lambda / ||x_j||^2. Ties between equal-objective candidates go to
 * the smaller magnitude.
 */
double scaled_threshold(const PenaltySpec& pen, double z, double weight, double lambda);

// Thresholding function of the penalty: scaled_threshold with weight == lambda.
inline double univariate_threshold(const PenaltySpec& pen, double z, double lambda)
{
    return scaled_threshold(pen, z, lambda, lambda);
}

} // namespace puffer
