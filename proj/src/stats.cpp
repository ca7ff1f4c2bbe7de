#include "reslab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace reslab {

double mean(const std::vector<double>& xs)
{
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(const std::vector<double>& xs)
{
    if (xs.empty()) return 0.0;
    const double m = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return acc / static_cast<double>(xs.size());
}

double sample_stddev(const std::vector<double>& xs)
{
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys)
{
    if (xs.size() != ys.size()) throw std::invalid_argument("pearson: size mismatch");
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;
    const double mx = mean(xs), my = mean(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<double> ranks(const std::vector<double>& xs)
{
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> rk(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;  // average rank, 1-based
        for (std::size_t k = i; k <= j; ++k) rk[order[k]] = r;
        i = j + 1;
    }
    return rk;
}

}  // namespace

double spearman(const std::vector<double>& xs, const std::vector<double>& ys)
{
    return pearson(ranks(xs), ranks(ys));
}

double incomplete_beta(double a, double b, double x)
{
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    // Lentz continued fraction for the regularized incomplete beta.
    auto betacf = [](double aa, double bb, double xx) {
        const int max_iter = 300;
        const double eps = 3e-14, fpmin = 1e-300;
        const double qab = aa + bb, qap = aa + 1.0, qam = aa - 1.0;
        double c = 1.0;
        double d = 1.0 - qab * xx / qap;
        if (std::fabs(d) < fpmin) d = fpmin;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m <= max_iter; ++m) {
            const double m2 = 2.0 * m;
            double num = m * (bb - m) * xx / ((qam + m2) * (aa + m2));
            d = 1.0 + num * d;
            if (std::fabs(d) < fpmin) d = fpmin;
            c = 1.0 + num / c;
            if (std::fabs(c) < fpmin) c = fpmin;
            d = 1.0 / d;
            h *= d * c;
            num = -(aa + m) * (qab + m) * xx / ((aa + m2) * (qap + m2));
            d = 1.0 + num * d;
            if (std::fabs(d) < fpmin) d = fpmin;
            c = 1.0 + num / c;
            if (std::fabs(c) < fpmin) c = fpmin;
            d = 1.0 / d;
            const double del = d * c;
            h *= del;
            if (std::fabs(del - 1.0) < eps) break;
        }
        return h;
    };
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b)
                            + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double nu)
{
    const double x = nu / (nu + t * t);
    const double p = 0.5 * incomplete_beta(0.5 * nu, 0.5, x);
    return t > 0.0 ? 1.0 - p : p;
}

double spearman_pvalue_negative(double rho, std::size_t n)
{
    if (n < 3) return 1.0;
    if (rho <= -1.0) return 0.0;
    if (rho >= 1.0) return 1.0;
    const double nu = static_cast<double>(n - 2);
    const double t = rho * std::sqrt(nu / (1.0 - rho * rho));
    return student_t_cdf(t, nu);
}

}  // namespace reslab
