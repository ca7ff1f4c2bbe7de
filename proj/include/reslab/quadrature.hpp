#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace reslab {

/// Gauss-Hermite rule: nodes x_i and weights w_i such that
/// integral of exp(-x^2) f(x) dx ~ sum_i w_i f(x_i).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Golub-Welsch construction from the Hermite Jacobi matrix.
GaussHermiteRule gauss_hermite(int n);

/// Gauss-Legendre rule on [-1, 1]: integral of f ~ sum_i w_i f(x_i).
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

/// Integrate f over [a, b] with the given Legendre rule.
template <typename F>
double integrate_segment(const GaussLegendreRule& rule, double a, double b, F&& f)
{
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

/// E[f(Z)] for Z ~ Normal(0, var), evaluated with the given rule.
/// f is any callable double -> double.
template <typename F>
double gaussian_expectation(const GaussHermiteRule& rule, double var, F&& f)
{
    // z = sqrt(2 var) x maps the weight exp(-x^2) onto the normal density.
    constexpr double inv_sqrt_pi = 0.5641895835477562869;
    double scale = var > 0.0 ? std::sqrt(2.0 * var) : 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(scale * rule.nodes[i]);
    return acc * inv_sqrt_pi;
}

}  // namespace reslab
