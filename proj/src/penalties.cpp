#include <puffer/penalties.hpp>
#include <puffer/errors.hpp>
#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace puffer {

namespace {

void require_nonneg(double lambda, const char* where)
{
    if (!(lambda >= 0.0)) {
        throw DomainError(std::string(where) + ": lambda must be nonnegative");
    }
}

double sign(double x) { return (x > 0.0) - (x < 0.0); }

// Penalty restricted to b >= 0.
double pen_pos(const PenaltySpec& pen, double b, double lambda)
{
    switch (pen.kind) {
        case PenaltyKind::lasso:
            return b;
        case PenaltyKind::elastic_net:
            return b + 0.5 * pen.param * b * b;
        case PenaltyKind::scad: {
            const double a = pen.param;
            if (b <= lambda) return b;
            if (b <= a * lambda) {
                return (2.0 * a * lambda * b - b * b - lambda * lambda) / (2.0 * (a - 1.0) * lambda);
            }
            return 0.5 * (a + 1.0) * lambda;
        }
        case PenaltyKind::mcp: {
            const double g = pen.param;
            if (b <= g * lambda) return b - b * b / (2.0 * g * lambda);
            return 0.5 * g * lambda;
        }
    }
    return 0.0;
}

double dpen_pos(const PenaltySpec& pen, double b, double lambda)
{
    switch (pen.kind) {
        case PenaltyKind::lasso:
            return 1.0;
        case PenaltyKind::elastic_net:
            return 1.0 + pen.param * b;
        case PenaltyKind::scad: {
            const double a = pen.param;
            if (b <= lambda) return 1.0;
            if (b <= a * lambda) return (a * lambda - b) / ((a - 1.0) * lambda);
            return 0.0;
        }
        case PenaltyKind::mcp: {
            const double g = pen.param;
            if (b <= g * lambda) return 1.0 - b / (g * lambda);
            return 0.0;
        }
    }
    return 0.0;
}

} // namespace

void PenaltySpec::validate() const
{
    switch (kind) {
        case PenaltyKind::lasso:
            return;
        case PenaltyKind::elastic_net:
            if (!(param > 0.0 && param <= 1.0)) throw DomainError("elastic_net: alpha must lie in (0, 1]");
            return;
        case PenaltyKind::scad:
            if (!(param > 2.0 && std::isfinite(param))) throw DomainError("scad: a must exceed 2");
            return;
        case PenaltyKind::mcp:
            if (!(param > 1.0 && std::isfinite(param))) throw DomainError("mcp: gamma must exceed 1");
            return;
    }
}

std::string_view to_string(PenaltyKind kind)
{
    switch (kind) {
        case PenaltyKind::lasso: return "lasso";
        case PenaltyKind::elastic_net: return "enet";
        case PenaltyKind::scad: return "scad";
        case PenaltyKind::mcp: return "mcp";
    }
    return "unknown";
}

PenaltySpec parse_penalty(std::string_view name, const double* param)
{
    PenaltySpec p;
    if (name == "lasso") {
        p = PenaltySpec::lasso();
    } else if (name == "enet" || name == "elastic_net") {
        p = PenaltySpec::elastic_net(0.5);
    } else if (name == "scad") {
        p = PenaltySpec::scad();
    } else if (name == "mcp") {
        p = PenaltySpec::mcp();
    } else {
        throw InputError("unknown penalty '" + std::string(name) + "' (expected lasso|enet|scad|mcp)");
    }
    if (param) p.param = *param;
    p.validate();
    return p;
}

double soft_threshold(double x, double lambda)
{
    require_nonneg(lambda, "soft_threshold");
    return sign(x) * std::max(std::abs(x) - lambda, 0.0);
}

double pen_value(const PenaltySpec& pen, double x, double lambda)
{
    require_nonneg(lambda, "pen_value");
    return pen_pos(pen, std::abs(x), lambda);
}

double pen_derivative(const PenaltySpec& pen, double x, double lambda)
{
    require_nonneg(lambda, "pen_derivative");
    if (x == 0.0) {
        throw DomainError("pen_derivative: penalty is non-differentiable at zero");
    }
    return sign(x) * dpen_pos(pen, std::abs(x), lambda);
}

double scaled_threshold(const PenaltySpec& pen, double z, double weight, double lambda)
{
    require_nonneg(weight, "scaled_threshold");
    require_nonneg(lambda, "scaled_threshold");
    if (weight == 0.0) return z;

    const double t = std::abs(z);
    const double s = sign(z);

    switch (pen.kind) {
        case PenaltyKind::lasso:
            return s * std::max(t - weight, 0.0);
        case PenaltyKind::elastic_net:
            return s * std::max(t - weight, 0.0) / (1.0 + weight * pen.param);
        case PenaltyKind::scad:
        case PenaltyKind::mcp:
            break;
    }

    // Piecewise-quadratic objective on b >= 0: enumerate each piece's clipped
    // stationary point and the knots, keep the best. Candidates are sorted so
    // that exact ties resolve to the smaller magnitude.
    auto f = [&](double b) { return 0.5 * (b - t) * (b - t) + weight * pen_pos(pen, b, lambda); };
    std::array<double, 6> cand{};
    std::size_t nc = 0;
    cand[nc++] = 0.0;

    if (pen.kind == PenaltyKind::scad) {
        const double a = pen.param;
        const double k1 = lambda, k2 = a * lambda;
        cand[nc++] = std::clamp(t - weight, 0.0, k1);
        if (lambda > 0.0) {
            const double q = 1.0 - weight / ((a - 1.0) * lambda);
            if (q > 0.0) cand[nc++] = std::clamp((t - weight * a / (a - 1.0)) / q, k1, k2);
        }
        cand[nc++] = k1;
        cand[nc++] = k2;
        cand[nc++] = std::max(t, k2);
    } else {
        const double g = pen.param;
        const double k = g * lambda;
        if (lambda > 0.0) {
            const double q = 1.0 - weight / k;
            if (q > 0.0) cand[nc++] = std::clamp((t - weight) / q, 0.0, k);
        }
        cand[nc++] = k;
        cand[nc++] = std::max(t, k);
    }

    std::sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(nc));
    double best = cand[0];
    double best_f = f(best);
    for (std::size_t i = 1; i < nc; ++i) {
        const double fi = f(cand[i]);
        if (fi < best_f) {
            best = cand[i];
            best_f = fi;
        }
    }
    return s * best;
}

} // namespace puffer
