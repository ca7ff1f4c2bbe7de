#pragma once

#include "reslab/esn.hpp"
#include "reslab/timeseries.hpp"

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace reslab {

/// Which reservoir map the exponent describes: the undriven map, the
/// input-driven training map, or the trained closed-loop map.
enum class ExponentKind { NoInput, Driven, ClosedLoop };

/// Maximal-exponent estimate, per discrete step. Divide by dt explicitly
/// when comparing against continuous-time spectra.
struct LyapunovEstimate {
    double lambda = 0.0;
    long steps_used = 0;
    bool converged = false;
    double tolerance = 0.0;
    std::vector<double> running_sequence;  // partial estimates, one per check
};

/// Sentinel for minus infinity (zero Jacobian): keeps CSV output finite.
inline constexpr double kLambdaFloor = -50.0;

/// Tangent propagator of the driven map at state r with input u: the action
/// delta -> D A delta with D = diag(1 - tanh^2(b)), b the local field.
struct TangentOperator {
    const Eigen::MatrixXd* A = nullptr;
    Eigen::VectorXd d;  // diagonal of D

    Eigen::VectorXd apply(const Eigen::VectorXd& delta) const
    {
        return d.cwiseProduct(*A * delta);
    }
};

TangentOperator jacobian_factor(const Reservoir& res, const Eigen::VectorXd& r,
                                const Eigen::VectorXd& u);

/// Maximal exponent of the (driven or undriven) training map by evolving one
/// tangent vector with per-step norm extraction. Converged when the first-
/// and second-half averages of the accumulated log stretches agree within
/// tol. Input columns are cycled if steps exceeds the series length.
/// tangent_seed varies the initial tangent direction (0: derive from the
/// reservoir seed); the converged estimate does not depend on it.
LyapunovEstimate training_lyapunov_qr(const Reservoir& res, const TimeSeries& input,
                                      ExponentKind kind, long steps, long warmup,
                                      double tol = 0.01, std::uint64_t tangent_seed = 0);

/// Same estimator applied to the closed-loop map r -> tanh(A r + W_in W_out f(r)).
/// The readout chain rule passes through the Lu map (squared components
/// contribute a factor 2 r_j).
LyapunovEstimate closed_loop_lyapunov(const Reservoir& res, const TrainedReadout& ro,
                                      const Eigen::VectorXd& r_init, long steps,
                                      double tol = 0.01, std::uint64_t tangent_seed = 0);

}  // namespace reslab
