#pragma once

#include <cstddef>
#include <vector>

namespace reslab {

double mean(const std::vector<double>& xs);

/// Population variance (divide by n). This is the variance convention used
/// throughout: series normalization, component stddevs and memory-capacity
/// correlations all share it.
double variance(const std::vector<double>& xs);

double sample_stddev(const std::vector<double>& xs);

/// Pearson correlation coefficient; 0 when either side is constant.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

/// Spearman rank correlation (average ranks on ties).
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

/// One-sided p-value for observing correlation <= rho under the null of no
/// association, via the t approximation with n-2 degrees of freedom.
double spearman_pvalue_negative(double rho, std::size_t n);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// CDF of Student's t distribution with nu degrees of freedom.
double student_t_cdf(double t, double nu);

}  // namespace reslab
