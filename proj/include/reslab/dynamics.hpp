#pragma once

#include "reslab/timeseries.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace reslab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class SystemKind { Lorenz63, Halvorsen };

/// One of the 3-dimensional benchmark flows.
///
/// Lorenz63 is the standard form dx/dt = sigma (y - x),
/// dy/dt = x (rho - z) - y, dz/dt = x y - beta z, which is the system with
/// maximal exponent 0.901 at (10, 28, 8/3). Halvorsen is the cyclically
/// symmetric dx/dt = -a x - 4(y + z) - y^2.
struct OdeSystem {
    SystemKind kind = SystemKind::Lorenz63;
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
    double a = 1.3;

    static OdeSystem lorenz63() { return {SystemKind::Lorenz63}; }
    static OdeSystem halvorsen() { return {SystemKind::Halvorsen}; }

    Vec3 derivative(const Vec3& x) const;
    Mat3 jacobian(const Vec3& x) const;
};

/// Reference maximal exponent of the system, in 1/time. Used to express
/// prediction horizons in Lyapunov times and to size training windows.
double attractor_lambda1(const OdeSystem& system);

struct Trajectory {
    std::vector<Vec3> states;
    double inner_step = 0.0;
    double t_total = 0.0;
};

using VectorField = std::function<Vec3(const Vec3&)>;

/// Classic fixed-step RK4 of an arbitrary 3-d vector field.
/// Returns floor(t_total/h) + 1 states including the initial one.
/// Throws divergence_error if the state leaves the finite range.
Trajectory integrate_field(const VectorField& field, const Vec3& x0, double h,
                           double t_total);

Trajectory integrate(const OdeSystem& system, const Vec3& x0, double h, double t_total);

/// Keep every (dt / inner_step)-th state as a column. dt must be an integer
/// multiple of the trajectory's inner step (1e-9 relative).
TimeSeries sample(const Trajectory& traj, double dt);

/// Divide all components by the stddev of the largest-variance component so
/// the maximal component variance becomes one. The common scalar is recorded
/// in normalization_scale and per-component stddevs are recomputed.
TimeSeries normalize(const TimeSeries& series);

/// Row-subset of the series; dt and the stddevs of kept components survive.
TimeSeries select_components(const TimeSeries& series, const std::vector<int>& indices);

/// Full Lyapunov spectrum of the flow by tangent-space evolution with
/// Gram-Schmidt reorthonormalization every `renorm_interval` time units.
/// Exponents are sorted descending, in 1/time.
Eigen::Vector3d lyapunov_spectrum(const OdeSystem& system, const Vec3& x0, double h,
                                  double t_total, double renorm_interval = 1.0);

using JacobianField = std::function<Mat3(const Vec3&)>;

Eigen::Vector3d lyapunov_spectrum_field(const VectorField& field,
                                        const JacobianField& jacobian, const Vec3& x0,
                                        double h, double t_total,
                                        double renorm_interval = 1.0);

/// i.i.d. standard-normal scalar series (dt = 1), seeded.
TimeSeries gaussian_input(Eigen::Index T, std::uint64_t seed);

/// Burn-in length (time units) discarded before any sampling, so training
/// data lives on the attractor.
inline constexpr double kAttractorBurnIn = 100.0;

/// Default inner integration step paired with the dt = 0.1 sampling.
inline constexpr double kDefaultInnerStep = 0.01;

/// Attractor series generator used by single runs and sweeps: random initial
/// condition in [-1,1]^3, burn-in discarded, sampled at dt, normalized.
TimeSeries generate_series(const OdeSystem& system, double dt, Eigen::Index n_samples,
                           std::uint64_t seed, double h = kDefaultInnerStep,
                           double burn_in = kAttractorBurnIn);

}  // namespace reslab
