#pragma once

#include "reslab/esn.hpp"
#include "reslab/timeseries.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace reslab {

/// Normalized deviation eps_alpha(t) = |y - v| / sigma_y per component.
Eigen::MatrixXd deviation(const TimeSeries& pred, const TimeSeries& target);

/// Duration, in Lyapunov times of the target system, before any component
/// deviates by more than `threshold` standard deviations.
struct ValidTime {
    double lyapunov_times = 0.0;
    std::optional<int> failed_component;
    bool censored = false;  // no crossing within the horizon
    bool diverged = false;  // prediction blew up before the horizon
};

/// First step where any eps exceeds the threshold; valid time is
/// step * dt * lambda1. Without a crossing the horizon value is returned
/// with the censored flag set.
ValidTime valid_time(const TimeSeries& pred, const TimeSeries& target, double threshold,
                     double lambda1);

/// Prediction-aware wrapper: scores only the delivered columns, counts a
/// divergence as a crossing at the truncation point.
ValidTime score_prediction(const Prediction& pred, const TimeSeries& target,
                           double threshold, double lambda1);

/// Number of singular values above rel_tol times the largest.
int numerical_rank(const Eigen::MatrixXd& R, double rel_tol = 1e-10);

struct MemoryCapacityResult {
    double mc_total = 0.0;
    std::vector<double> mc_per_delay;  // index tau-1, each in [0, 1]
    int tau_max_used = 0;
};

/// Linear short-term memory of a scalar-input reservoir: drive with i.i.d.
/// Gaussian input, fit one ridge readout per delay tau to reconstruct
/// u(t - tau), and score the squared correlation on held-out data.
MemoryCapacityResult memory_capacity(const Reservoir& res, long T, int tau_max,
                                     double ridge_mc, std::uint64_t seed);

struct BifurcationScan {
    std::vector<double> parameter_values;                 // the n sigma_in^2 ladder
    std::vector<std::vector<double>> attractor_samples;   // component 0, post-transient
    std::vector<bool> is_fixed_point;
    std::vector<bool> diverged;
    double fixed_point_threshold = 1e-3;
};

struct BifurcationSettings {
    EsnConfig esn_template;      // N, n, s, seed; sigma's are derived per rung
    double gA2 = 1e-2;           // s N sigma_A^2 held fixed across the ladder
    double ridge_k = 1e-2;
    long transient = 2000;
    long horizon = 2000;
    double fixed_point_threshold = 1e-3;
};

/// Train on Lorenz63 at each input scale of the ladder and record the
/// long-run closed-loop outputs of component 0. A rung is a fixed point when
/// every post-transient |v_0| stays below the threshold.
BifurcationScan bifurcation_scan(const BifurcationSettings& settings,
                                 const std::vector<double>& n_sin2_ladder);

/// First ladder value whose closed loop is no longer a fixed point; empty
/// when the dynamics never leaves it.
std::optional<double> bifurcation_threshold(const BifurcationScan& scan);

/// Diagonal reservoir A_ii = alpha i / N (i = 1..N): every neuron gets an
/// explicit time scale. W_in is Gaussian(0, sigma_in2) as usual.
Reservoir build_simple_esn(int N, double alpha, int n, double sigma_in2,
                           std::uint64_t seed);

}  // namespace reslab
