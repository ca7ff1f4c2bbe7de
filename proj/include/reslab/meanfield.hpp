#pragma once

#include "reslab/timeseries.hpp"

#include <Eigen/Dense>
#include <vector>

namespace reslab {

/// Inputs to the large-N theory: the combined gain gA2 = s N sigma_A^2, the
/// per-entry input-weight variance sigma_in^2, and samples of the normalized
/// input series carrying its empirical distribution.
///
/// The local-field density is the equal-weight Gaussian mixture with one
/// component per recorded sample u_k, of variance gA2 sigma_r^2 +
/// sigma_in^2 |u_k|^2: conditioning on u_k makes the Gaussian-weight input
/// contribution normal with exactly that variance.
struct MeanFieldInput {
    double gA2 = 0.0;
    double sin2 = 0.0;
    std::vector<Eigen::VectorXd> input_samples;

    /// Build from a series, thinning to at most max_samples columns
    /// (uniform stride) to keep quadrature tractable.
    static MeanFieldInput from_series(double gA2, double sin2, const TimeSeries& series,
                                      std::size_t max_samples = 2000);
};

/// Converged state-variance fixed point and the derived moments.
struct FixedPointResult {
    double sigma_r_star2 = 0.0;  // (sigma_r*)^2
    int iterations = 0;
    bool converged = false;
    double d2_mean = 1.0;  // <D_ii^2> = 1 - 2 (sigma_r*)^2 + <r^4>
    double r4_mean = 0.0;  // <r_i^4>
};

/// E[tanh^power(b)] under the local-field mixture at state variance
/// sigma_r2. power must be 2 or 4.
double local_field_moments(const MeanFieldInput& mfi, double sigma_r2, int power);

/// Iterate sigma_r^2 <- E[tanh^2(b)] from 0.25 until the update is below
/// tol, then evaluate <D_ii^2>. Without input and gA2 <= 1 the zero fixed
/// point is returned analytically (the map converges to it but slowly near
/// the critical gain).
FixedPointResult iterate_variance_map(const MeanFieldInput& mfi, double tol = 1e-10,
                                      int max_iter = 1000);

/// lambda_T = (ln gA2 + ln <D_ii^2>) / 2 per step; floored at the -50
/// sentinel when gA2 = 0.
double meanfield_lyapunov(const MeanFieldInput& mfi);

struct ContourPoint {
    double n_sin2 = 0.0;  // n sigma_in^2
    double gA2 = 0.0;     // gain at the lambda_T = 0 crossing
};

/// For each n sigma_in^2 grid value, bisect on ln(gA2) for the lambda_T = 0
/// crossing (|lambda_T| < 1e-4). Grid values without a sign change in range
/// are omitted. n_components is the input dimension that relates n sigma_in^2
/// to the per-entry sigma_in^2.
std::vector<ContourPoint> zero_contour(const std::vector<Eigen::VectorXd>& input_samples,
                                       int n_components, double gA2_min, double gA2_max,
                                       const std::vector<double>& n_sin2_grid);

}  // namespace reslab
