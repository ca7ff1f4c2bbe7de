#include "reslab/analysis.hpp"

#include "reslab/dynamics.hpp"
#include "reslab/errors.hpp"
#include "reslab/rng.hpp"
#include "reslab/stats.hpp"

#include <algorithm>
#include <cmath>

namespace reslab {

Eigen::MatrixXd deviation(const TimeSeries& pred, const TimeSeries& target)
{
    if (pred.samples.rows() != target.samples.rows() ||
        pred.samples.cols() != target.samples.cols())
        throw config_error("deviation: shape mismatch");
    if (target.component_stddevs.size() != target.components())
        throw config_error("deviation: target is missing component stddevs");
    if ((target.component_stddevs.array() <= 0.0).any())
        throw degenerate_error("deviation: a target component has zero stddev");

    return (pred.samples - target.samples).cwiseAbs().array().colwise() /
           target.component_stddevs.array();
}

ValidTime valid_time(const TimeSeries& pred, const TimeSeries& target, double threshold,
                     double lambda1)
{
    if (!(threshold > 0.0)) throw config_error("valid_time: threshold must be > 0");
    if (!(lambda1 > 0.0)) throw config_error("valid_time: lambda1 must be > 0");

    const Eigen::MatrixXd eps = deviation(pred, target);
    ValidTime vt;
    for (Eigen::Index t = 0; t < eps.cols(); ++t) {
        for (Eigen::Index c = 0; c < eps.rows(); ++c) {
            if (eps(c, t) > threshold) {
                vt.lyapunov_times = static_cast<double>(t) * target.dt * lambda1;
                vt.failed_component = static_cast<int>(c);
                return vt;
            }
        }
    }
    vt.lyapunov_times = static_cast<double>(eps.cols()) * target.dt * lambda1;
    vt.censored = true;
    return vt;
}

ValidTime score_prediction(const Prediction& pred, const TimeSeries& target,
                           double threshold, double lambda1)
{
    const Eigen::Index have = std::min(pred.series.samples.cols(), target.samples.cols());
    TimeSeries trimmed_target = target;
    trimmed_target.samples = target.samples.leftCols(have);

    TimeSeries trimmed_pred = pred.series;
    trimmed_pred.samples = pred.series.samples.leftCols(have);
    trimmed_pred.dt = target.dt;

    ValidTime vt = valid_time(trimmed_pred, trimmed_target, threshold, lambda1);
    if (pred.diverged) {
        vt.diverged = true;
        if (vt.censored) {
            // No threshold crossing before the blow-up: the crossing is the
            // truncation point itself.
            vt.censored = false;
            vt.lyapunov_times = static_cast<double>(have) * target.dt * lambda1;
        }
    }
    return vt;
}

int numerical_rank(const Eigen::MatrixXd& R, double rel_tol)
{
    if (R.size() == 0) throw config_error("numerical_rank: empty matrix");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(R);
    const Eigen::VectorXd sv = svd.singularValues();
    const double cutoff = rel_tol * sv(0);
    if (sv(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    return rank;
}

MemoryCapacityResult memory_capacity(const Reservoir& res, long T, int tau_max,
                                     double ridge_mc, std::uint64_t seed)
{
    if (res.n != 1) throw config_error("memory_capacity: reservoir input must be scalar");
    if (tau_max < 1) throw config_error("memory_capacity: tau_max must be >= 1");
    if (T <= tau_max + 64)
        throw config_error("memory_capacity: T must be well above tau_max");

    const TimeSeries input = gaussian_input(T, seed);
    const std::vector<Eigen::VectorXd> states =
        drive(res, input, Eigen::VectorXd::Zero(res.N));

    // states[t] saw input up to u(t-1); usable rows start after both the
    // synchronization transient and the deepest delay.
    const long start = std::max<long>(tau_max + 1, 100);
    const long usable = T - start + 1;
    const long train_count = (usable * 8) / 10;
    const long test_count = usable - train_count;
    if (test_count < 16) throw config_error("memory_capacity: held-out split too small");

    Eigen::MatrixXd S_train(res.N, train_count), S_test(res.N, test_count);
    for (long i = 0; i < train_count; ++i) S_train.col(i) = states[start + i];
    for (long i = 0; i < test_count; ++i) S_test.col(i) = states[start + train_count + i];

    Eigen::MatrixXd gram = S_train * S_train.transpose();
    gram.diagonal().array() += ridge_mc;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);

    MemoryCapacityResult result;
    result.tau_max_used = tau_max;
    result.mc_per_delay.resize(tau_max, 0.0);
    std::vector<double> truth(test_count), recon(test_count);
    for (int tau = 1; tau <= tau_max; ++tau) {
        Eigen::VectorXd target_train(train_count);
        for (long i = 0; i < train_count; ++i)
            target_train(i) = input.samples(0, start + i - tau);
        const Eigen::VectorXd w = ldlt.solve(S_train * target_train);

        for (long i = 0; i < test_count; ++i) {
            const long t = start + train_count + i;
            truth[i] = input.samples(0, t - tau);
            recon[i] = w.dot(S_test.col(i));
        }
        const double r = pearson(recon, truth);
        result.mc_per_delay[tau - 1] = r * r;
    }
    for (double v : result.mc_per_delay) result.mc_total += v;
    return result;
}

BifurcationScan bifurcation_scan(const BifurcationSettings& settings,
                                 const std::vector<double>& n_sin2_ladder)
{
    if (!std::is_sorted(n_sin2_ladder.begin(), n_sin2_ladder.end()))
        throw config_error("bifurcation_scan: ladder must be sorted ascending");

    const OdeSystem system = OdeSystem::lorenz63();
    const double lambda1 = attractor_lambda1(system);
    const double dt = 0.1;
    const int t_max = settings.esn_template.train_steps > 0
                          ? settings.esn_template.train_steps
                          : static_cast<int>(std::lround(200.0 / (lambda1 * dt)));
    const int warmup = settings.esn_template.warmup_steps;
    const Eigen::Index need = warmup + t_max + 2;

    BifurcationScan scan;
    scan.fixed_point_threshold = settings.fixed_point_threshold;

    for (double n_sin2 : n_sin2_ladder) {
        EsnConfig cfg = settings.esn_template;
        cfg.sigma_A2 = settings.gA2 / (cfg.s * cfg.N);
        cfg.sigma_in2 = n_sin2 / cfg.n;

        const TimeSeries full = generate_series(system, dt, need, cfg.seed);
        const TimeSeries input =
            cfg.n == 3 ? full : select_components(full, {1});

        const Reservoir res = build_reservoir(cfg);
        const Harvest h = harvest(res, input, warmup, t_max);
        const TrainedReadout ro =
            train_readout(h, settings.ridge_k, LuFeatureMap::second_half(cfg.N));
        const Prediction pred = predict_closed_loop(
            res, ro, h.r_final, settings.transient + settings.horizon, dt);

        scan.parameter_values.push_back(n_sin2);
        std::vector<double> tail;
        const Eigen::Index have = pred.series.samples.cols();
        for (Eigen::Index t = settings.transient; t < have; ++t)
            tail.push_back(pred.series.samples(0, t));
        const bool diverged = pred.diverged;
        bool fixed = !diverged && !tail.empty();
        for (double v : tail)
            if (std::abs(v) >= settings.fixed_point_threshold) fixed = false;
        scan.attractor_samples.push_back(std::move(tail));
        scan.is_fixed_point.push_back(fixed);
        scan.diverged.push_back(diverged);
    }
    return scan;
}

std::optional<double> bifurcation_threshold(const BifurcationScan& scan)
{
    for (std::size_t i = 0; i < scan.parameter_values.size(); ++i)
        if (!scan.is_fixed_point[i]) return scan.parameter_values[i];
    return std::nullopt;
}

Reservoir build_simple_esn(int N, double alpha, int n, double sigma_in2,
                           std::uint64_t seed)
{
    if (N < 1 || n < 1) throw config_error("build_simple_esn: N and n must be >= 1");
    if (alpha < 0.0) throw config_error("build_simple_esn: alpha must be >= 0");

    Reservoir res;
    res.N = N;
    res.n = n;
    res.s = 0.0;  // A is deterministic here; s and sigma_A2 are bookkeeping only
    res.sigma_A2 = 0.0;
    res.sigma_in2 = sigma_in2;
    res.seed = seed;
    res.A.setZero(N, N);
    for (int i = 1; i <= N; ++i)
        res.A(i - 1, i - 1) = alpha * static_cast<double>(i) / static_cast<double>(N);

    Rng rng(mix_seed({seed, 0x73696d706cULL}));
    const double sd_in = std::sqrt(sigma_in2);
    res.W_in.resize(N, n);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < n; ++j) res.W_in(i, j) = rng.gaussian(0.0, sd_in);
    return res;
}

}  // namespace reslab
