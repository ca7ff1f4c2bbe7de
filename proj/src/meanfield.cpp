#include "reslab/meanfield.hpp"

#include "reslab/errors.hpp"
#include "reslab/lyapunov.hpp"
#include "reslab/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace reslab {

namespace {

const GaussHermiteRule& moment_rule()
{
    static const GaussHermiteRule rule = gauss_hermite(64);
    return rule;
}

const GaussLegendreRule& complement_rule()
{
    static const GaussLegendreRule rule = gauss_legendre(32);
    return rule;
}

/// E[tanh^p(Z)] with Z ~ Normal(0, v). Gauss-Hermite resolves the tanh
/// transition only while its width 1/sqrt(v) is coarser than the node
/// spacing; for larger v the complement 1 - E[1 - tanh^p] is integrated in
/// z-space instead, where 1 - tanh^p decays like 4 exp(-2|z|) and the
/// integrand has O(1) width regardless of v.
double tanh_power_moment(double v, int power)
{
    if (v <= 0.0) return 0.0;
    auto tanh_pow = [power](double b) {
        const double t = std::tanh(b);
        const double t2 = t * t;
        return power == 2 ? t2 : t2 * t2;
    };
    if (v <= 8.0) return gaussian_expectation(moment_rule(), v, tanh_pow);

    auto complement_density = [&](double z) {
        return (1.0 - tanh_pow(z)) * std::exp(-0.5 * z * z / v);
    };
    double integral = 0.0;
    for (const auto& segment : {std::pair{0.0, 6.0}, {6.0, 12.0}, {12.0, 24.0}})
        integral += integrate_segment(complement_rule(), segment.first, segment.second,
                                      complement_density);
    const double norm = 2.0 / std::sqrt(2.0 * M_PI * v);  // both half-lines
    return 1.0 - norm * integral;
}

}  // namespace

MeanFieldInput MeanFieldInput::from_series(double gA2, double sin2,
                                           const TimeSeries& series,
                                           std::size_t max_samples)
{
    MeanFieldInput mfi;
    mfi.gA2 = gA2;
    mfi.sin2 = sin2;
    const std::size_t total = static_cast<std::size_t>(series.length());
    const std::size_t stride = total > max_samples ? total / max_samples : 1;
    for (std::size_t t = 0; t < total; t += stride)
        mfi.input_samples.push_back(series.samples.col(static_cast<Eigen::Index>(t)));
    return mfi;
}

double local_field_moments(const MeanFieldInput& mfi, double sigma_r2, int power)
{
    if (power != 2 && power != 4)
        throw config_error("local_field_moments: power must be 2 or 4");
    if (sigma_r2 < 0.0) throw config_error("local_field_moments: negative variance");
    if (mfi.sin2 > 0.0 && mfi.input_samples.empty())
        throw config_error("local_field_moments: input samples required when sin2 > 0");

    const double reservoir_var = mfi.gA2 * sigma_r2;
    if (mfi.sin2 == 0.0 || mfi.input_samples.empty())
        return tanh_power_moment(reservoir_var, power);

    double acc = 0.0;
    for (const Eigen::VectorXd& u : mfi.input_samples)
        acc += tanh_power_moment(reservoir_var + mfi.sin2 * u.squaredNorm(), power);
    return acc / static_cast<double>(mfi.input_samples.size());
}

FixedPointResult iterate_variance_map(const MeanFieldInput& mfi, double tol, int max_iter)
{
    if (!(tol > 0.0)) throw config_error("iterate_variance_map: tol must be > 0");

    FixedPointResult result;
    if (mfi.sin2 == 0.0 && mfi.gA2 <= 1.0) {
        // Subcritical without input: tanh(0) = 0 is the stable fixed point.
        result.sigma_r_star2 = 0.0;
        result.r4_mean = 0.0;
        result.d2_mean = 1.0;
        result.converged = true;
        return result;
    }

    double var = 0.25;
    for (int it = 1; it <= max_iter; ++it) {
        const double next = local_field_moments(mfi, var, 2);
        const double delta = std::abs(next - var);
        var = next;
        result.iterations = it;
        if (delta < tol) {
            result.converged = true;
            break;
        }
    }
    result.sigma_r_star2 = var;
    result.r4_mean = local_field_moments(mfi, var, 4);
    // Deep saturation can lose the tiny difference to rounding; keep the
    // squared-moment identity inside its mathematical range.
    result.d2_mean = std::clamp(1.0 - 2.0 * var + result.r4_mean, 0.0, 1.0);
    return result;
}

double meanfield_lyapunov(const MeanFieldInput& mfi)
{
    if (mfi.gA2 == 0.0) return kLambdaFloor;
    const FixedPointResult fp = iterate_variance_map(mfi);
    if (fp.d2_mean <= 0.0) return kLambdaFloor;
    const double lambda = 0.5 * (std::log(mfi.gA2) + std::log(fp.d2_mean));
    return std::max(lambda, kLambdaFloor);
}

std::vector<ContourPoint> zero_contour(const std::vector<Eigen::VectorXd>& input_samples,
                                       int n_components, double gA2_min, double gA2_max,
                                       const std::vector<double>& n_sin2_grid)
{
    if (!(gA2_min > 0.0) || !(gA2_max > gA2_min))
        throw config_error("zero_contour: need 0 < gA2_min < gA2_max");
    if (n_components < 1) throw config_error("zero_contour: n_components must be >= 1");

    std::vector<ContourPoint> contour;
    for (double n_sin2 : n_sin2_grid) {
        MeanFieldInput mfi;
        mfi.sin2 = n_sin2 / static_cast<double>(n_components);
        mfi.input_samples = input_samples;

        auto lambda_at = [&](double lg) {
            mfi.gA2 = std::exp(lg);
            return meanfield_lyapunov(mfi);
        };

        double lo = std::log(gA2_min), hi = std::log(gA2_max);
        double f_lo = lambda_at(lo), f_hi = lambda_at(hi);
        if (!(f_lo < 0.0 && f_hi > 0.0)) continue;  // no crossing in range

        double mid = 0.5 * (lo + hi), f_mid = 0.0;
        for (int it = 0; it < 200; ++it) {
            mid = 0.5 * (lo + hi);
            f_mid = lambda_at(mid);
            if (std::abs(f_mid) < 1e-4) break;
            if (f_mid < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        contour.push_back({n_sin2, std::exp(mid)});
    }
    return contour;
}

}  // namespace reslab
