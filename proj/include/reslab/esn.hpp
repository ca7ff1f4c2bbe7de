#pragma once

#include "reslab/timeseries.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace reslab {

/// Construction parameters for a random reservoir plus the training knobs.
struct EsnConfig {
    int N = 500;                 // reservoir dimension
    int n = 3;                   // input dimension
    double s = 1.0;              // connection probability in A
    double sigma_A2 = 0.0;       // variance of nonzero A entries
    double sigma_in2 = 0.0;      // variance of W_in entries
    double ridge_k = 1e-2;
    int warmup_steps = 1000;
    int train_steps = 0;         // T_max; 0 means "derive from the task"
    std::uint64_t seed = 1;
};

/// Fixed random weights. A entries are nonzero with probability s and then
/// Gaussian(0, sigma_A2); W_in is dense Gaussian(0, sigma_in2). Everything is
/// a deterministic function of the seed.
struct Reservoir {
    Eigen::MatrixXd A;      // N x N
    Eigen::MatrixXd W_in;   // N x n
    int N = 0;
    int n = 0;
    double s = 1.0;
    double sigma_A2 = 0.0;
    double sigma_in2 = 0.0;
    std::uint64_t seed = 0;
};

Reservoir build_reservoir(const EsnConfig& config);

/// Indices of reservoir components that the readout squares. Squaring half
/// the state breaks the u -> -u symmetry of the tanh dynamics.
struct LuFeatureMap {
    std::vector<int> squared_indices;

    /// The second half [N/2, N) of the state vector.
    static LuFeatureMap second_half(int N);
};

Eigen::VectorXd lu_features(const Eigen::VectorXd& r, const LuFeatureMap& map);

/// Linear readout trained by ridge regression, applied after lu_features.
struct TrainedReadout {
    Eigen::MatrixXd W_out;  // n x N
    double ridge_k = 0.0;
    LuFeatureMap feature_map;
};

/// Open-loop states R (columns r(0..T_max-1)) with aligned targets: column t
/// was produced from input up to u(t-1) and its target is u(t). r_final is
/// the state after one more drive step, i.e. the handoff state for
/// closed-loop prediction.
struct Harvest {
    Eigen::MatrixXd R;        // N x T_max
    Eigen::MatrixXd targets;  // n x T_max
    int warmup_used = 0;
    Eigen::VectorXd r_final;
};

/// r(t+1) = tanh(A r(t) + W_in u(t)) over all input columns.
/// Returns T+1 states including r0.
std::vector<Eigen::VectorXd> drive(const Reservoir& res, const TimeSeries& input,
                                   const Eigen::VectorXd& r0);

/// Drive for `warmup` steps, then record t_max state columns and targets.
/// Requires input length >= warmup + t_max + 1 (one extra column feeds the
/// handoff state).
Harvest harvest(const Reservoir& res, const TimeSeries& input, int warmup, int t_max,
                const Eigen::VectorXd& r0 = Eigen::VectorXd());

/// W_out = Y F^T (F F^T + k I)^{-1} with F = lu_features applied columnwise
/// to h.R, solved through a symmetric factorization.
TrainedReadout train_readout(const Harvest& h, double k, const LuFeatureMap& map);

/// Closed-loop output. If the output leaves the finite (or plausibly bounded)
/// range the series is truncated and `diverged` is set; divergence is a
/// measured outcome, not an exception.
struct Prediction {
    TimeSeries series;
    bool diverged = false;
    long diverged_at = -1;
};

/// v(0) = W_out f(r_init); r <- tanh(A r + W_in v), v <- W_out f(r).
/// Emits `steps` outputs with sampling interval dt.
Prediction predict_closed_loop(const Reservoir& res, const TrainedReadout& ro,
                               const Eigen::VectorXd& r_init, long steps,
                               double dt = 1.0);

/// Outputs larger than this count as diverged: normalized series live at
/// O(1) scale, so 1e6 standard deviations is unambiguous blow-up even though
/// tanh keeps the state itself finite.
inline constexpr double kDivergenceGuard = 1e6;

std::string reservoir_to_json(const Reservoir& res);
Reservoir reservoir_from_json(const std::string& text);
std::string readout_to_json(const TrainedReadout& ro);
TrainedReadout readout_from_json(const std::string& text);

}  // namespace reslab
