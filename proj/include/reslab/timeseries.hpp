#pragma once

#include <Eigen/Dense>
#include <vector>

namespace reslab {

/// A sampled multivariate series: rows are components, columns are time.
/// component_stddevs and normalization_scale are filled in by normalize().
struct TimeSeries {
    Eigen::MatrixXd samples;         // n x T
    double dt = 1.0;                 // sampling interval
    Eigen::VectorXd component_stddevs;
    double normalization_scale = 1.0;

    Eigen::Index components() const { return samples.rows(); }
    Eigen::Index length() const { return samples.cols(); }
};

}  // namespace reslab
