#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "reslab/dynamics.hpp"
#include "reslab/errors.hpp"
#include "reslab/esn.hpp"
#include "reslab/meanfield.hpp"

#include <cmath>

using namespace reslab;

namespace {

TimeSeries constant_series(int n, Eigen::Index T, double value)
{
    TimeSeries s;
    s.dt = 1.0;
    s.samples = Eigen::MatrixXd::Constant(n, T, value);
    return s;
}

}  // namespace

TEST_CASE("build_reservoir: s = 0 gives the zero matrix")
{
    EsnConfig cfg;
    cfg.N = 50;
    cfg.n = 2;
    cfg.s = 0.0;
    cfg.sigma_A2 = 1.0;
    cfg.sigma_in2 = 0.5;
    const Reservoir res = build_reservoir(cfg);
    CHECK(res.A.isZero(0.0));
    CHECK(res.W_in.rows() == 50);
    CHECK(res.W_in.cols() == 2);
}

TEST_CASE("build_reservoir: same seed is bit-identical")
{
    EsnConfig cfg;
    cfg.N = 64;
    cfg.n = 3;
    cfg.s = 0.3;
    cfg.sigma_A2 = 0.01;
    cfg.sigma_in2 = 0.2;
    cfg.seed = 1234;
    const Reservoir a = build_reservoir(cfg);
    const Reservoir b = build_reservoir(cfg);
    CHECK(a.A.isApprox(b.A, 0.0));
    CHECK(a.W_in.isApprox(b.W_in, 0.0));
}

TEST_CASE("build_reservoir: row square sums average to s N sigma_A2")
{
    EsnConfig cfg;
    cfg.N = 1000;
    cfg.n = 1;
    cfg.s = 0.5;
    cfg.sigma_A2 = 0.002;  // s N sigma_A2 = 1
    cfg.seed = 5;
    const Reservoir res = build_reservoir(cfg);
    const double mean_row_sq = res.A.array().square().rowwise().sum().mean();
    CHECK(mean_row_sq == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("build_reservoir: sparsity and nonzero variance match the request")
{
    EsnConfig cfg;
    cfg.N = 200;  // s N^2 = 2e4 >= 1e4
    cfg.n = 1;
    cfg.s = 0.5;
    cfg.sigma_A2 = 0.004;
    cfg.seed = 77;
    const Reservoir res = build_reservoir(cfg);

    long nonzero = 0;
    double sumsq = 0.0;
    for (int i = 0; i < cfg.N; ++i)
        for (int j = 0; j < cfg.N; ++j)
            if (res.A(i, j) != 0.0) {
                ++nonzero;
                sumsq += res.A(i, j) * res.A(i, j);
            }
    // Binomial z-test at p < 0.001 (|z| < 3.29).
    const double total = static_cast<double>(cfg.N) * cfg.N;
    const double z = (static_cast<double>(nonzero) - cfg.s * total) /
                     std::sqrt(total * cfg.s * (1.0 - cfg.s));
    CHECK(std::abs(z) < 3.29);
    const double var_nonzero = sumsq / static_cast<double>(nonzero);
    CHECK(var_nonzero == doctest::Approx(cfg.sigma_A2).epsilon(0.10));
}

TEST_CASE("drive: zero weights give zero states")
{
    EsnConfig cfg;
    cfg.N = 10;
    cfg.n = 2;
    cfg.s = 0.0;
    cfg.sigma_in2 = 0.0;
    const Reservoir res = build_reservoir(cfg);
    const auto states = drive(res, constant_series(2, 8, 1.5), Eigen::VectorXd::Zero(10));
    CHECK(states.size() == 9);
    for (const auto& s : states) CHECK(s.isZero(0.0));
}

TEST_CASE("drive: scalar reservoir matches hand iteration")
{
    Reservoir res;
    res.N = 1;
    res.n = 1;
    res.A.resize(1, 1);
    res.A << 0.7;
    res.W_in.resize(1, 1);
    res.W_in << -0.4;

    TimeSeries input;
    input.dt = 1.0;
    input.samples.resize(1, 5);
    input.samples << 0.1, -0.3, 0.8, 0.0, 0.5;

    Eigen::VectorXd r0(1);
    r0 << 0.2;
    const auto states = drive(res, input, r0);

    double r = 0.2;
    for (int t = 0; t < 5; ++t) {
        r = std::tanh(0.7 * r - 0.4 * input.samples(0, t));
        CHECK(states[t + 1](0) == doctest::Approx(r).epsilon(1e-15));
    }
}

TEST_CASE("drive: states stay strictly inside (-1, 1)")
{
    EsnConfig cfg;
    cfg.N = 80;
    cfg.n = 3;
    cfg.s = 1.0;
    cfg.sigma_A2 = 4.0 / 80.0;
    cfg.sigma_in2 = 0.25;
    cfg.seed = 3;
    const Reservoir res = build_reservoir(cfg);
    const TimeSeries input = generate_series(OdeSystem::lorenz63(), 0.1, 200, 11);
    const auto states = drive(res, input, Eigen::VectorXd::Zero(80));
    double lo = 0.0, hi = 0.0;
    for (std::size_t k = 1; k < states.size(); ++k) {
        hi = std::max(hi, states[k].maxCoeff());
        lo = std::min(lo, states[k].minCoeff());
    }
    CHECK(hi < 1.0);
    CHECK(lo > -1.0);

    // Saturating drive rounds tanh to exactly +-1 in doubles; the closed
    // range still holds.
    cfg.sigma_in2 = 50.0;
    cfg.seed = 4;
    const Reservoir hot = build_reservoir(cfg);
    const auto hot_states = drive(hot, input, Eigen::VectorXd::Zero(80));
    for (const auto& s : hot_states) {
        CHECK(s.maxCoeff() <= 1.0);
        CHECK(s.minCoeff() >= -1.0);
    }
}

TEST_CASE("drive: contractive reservoirs synchronize from different r0" *
          doctest::timeout(120))
{
    // gA2 = 0.25 keeps the mean-field exponent near ln(0.25)/2 = -0.69.
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL, 6ULL, 7ULL, 8ULL, 9ULL, 10ULL}) {
        EsnConfig cfg;
        cfg.N = 500;
        cfg.n = 1;
        cfg.s = 1.0;
        cfg.sigma_A2 = 0.25 / 500.0;
        cfg.sigma_in2 = 1.0;
        cfg.seed = seed;
        const Reservoir res = build_reservoir(cfg);
        const TimeSeries input = select_components(
            generate_series(OdeSystem::lorenz63(), 0.1, 520, seed + 100), {1});

        Eigen::VectorXd r0a = Eigen::VectorXd::Zero(500);
        Eigen::VectorXd r0b = Eigen::VectorXd::Constant(500, 0.9);
        const auto sa = drive(res, input, r0a);
        const auto sb = drive(res, input, r0b);
        const double dist = (sa[500] - sb[500]).cwiseAbs().maxCoeff();
        CHECK(dist <= 1e-6);
    }
}

TEST_CASE("harvest: smallest case records the warmed state and its target")
{
    EsnConfig cfg;
    cfg.N = 4;
    cfg.n = 1;
    cfg.s = 1.0;
    cfg.sigma_A2 = 0.01;
    cfg.sigma_in2 = 0.1;
    cfg.seed = 2;
    const Reservoir res = build_reservoir(cfg);

    TimeSeries input;
    input.dt = 1.0;
    input.samples.resize(1, 3);
    input.samples << 0.4, -0.2, 0.9;

    const Harvest h = harvest(res, input, 0, 1);
    CHECK(h.R.cols() == 1);
    CHECK(h.R.col(0).isZero(0.0));  // zero r0, no warmup steps
    CHECK(h.targets(0, 0) == 0.4);

    // Custom r0 shows up unchanged as column 0.
    Eigen::VectorXd r0 = Eigen::VectorXd::Constant(4, 0.3);
    const Harvest h2 = harvest(res, input, 0, 1, r0);
    CHECK(h2.R.col(0).isApprox(r0, 0.0));
}

TEST_CASE("harvest: columns and handoff state match an open-loop drive")
{
    EsnConfig cfg;
    cfg.N = 30;
    cfg.n = 3;
    cfg.s = 1.0;
    cfg.sigma_A2 = 1.0 / 30.0;
    cfg.sigma_in2 = 0.3;
    cfg.seed = 8;
    const Reservoir res = build_reservoir(cfg);
    const TimeSeries input = generate_series(OdeSystem::lorenz63(), 0.1, 60, 21);

    const int warmup = 10, t_max = 40;
    const Harvest h = harvest(res, input, warmup, t_max);
    const auto states = drive(res, input, Eigen::VectorXd::Zero(30));

    // drive()'s state g saw inputs up to u(g-1), exactly the harvest alignment.
    for (int t = 0; t < t_max; ++t) {
        CHECK(h.R.col(t).isApprox(states[warmup + t], 1e-15));
        CHECK(h.targets.col(t).isApprox(input.samples.col(warmup + t), 0.0));
    }
    CHECK(h.r_final.isApprox(states[warmup + t_max], 1e-15));
}

TEST_CASE("harvest: zero input and zero A give an all-zero R")
{
    EsnConfig cfg;
    cfg.N = 6;
    cfg.n = 1;
    cfg.s = 0.0;
    cfg.sigma_in2 = 0.5;
    cfg.seed = 4;
    const Reservoir res = build_reservoir(cfg);
    const Harvest h = harvest(res, constant_series(1, 20, 0.0), 5, 10);
    CHECK(h.R.isZero(0.0));
}

TEST_CASE("harvest: paper-scale dimensions for 200 Lyapunov times")
{
    const int t_max = static_cast<int>(std::lround(200.0 / (0.901 * 0.1)));
    CHECK(t_max == 2220);
    // Dimension check only; a short reservoir suffices to exercise the shapes.
    EsnConfig cfg;
    cfg.N = 20;
    cfg.n = 1;
    cfg.s = 1.0;
    cfg.sigma_A2 = 0.01;
    cfg.sigma_in2 = 0.2;
    cfg.seed = 6;
    const Reservoir res = build_reservoir(cfg);
    const TimeSeries input = select_components(
        generate_series(OdeSystem::lorenz63(), 0.1, t_max + 102, 31), {1});
    const Harvest h = harvest(res, input, 100, t_max);
    CHECK(h.R.rows() == 20);
    CHECK(h.R.cols() == 2220);
}

TEST_CASE("harvest: insufficient input is a configuration error")
{
    EsnConfig cfg;
    cfg.N = 5;
    cfg.n = 1;
    cfg.s = 0.5;
    cfg.sigma_A2 = 0.1;
    cfg.sigma_in2 = 0.1;
    const Reservoir res = build_reservoir(cfg);
    CHECK_THROWS_AS(harvest(res, constant_series(1, 10, 0.1), 5, 5), config_error);
}

TEST_CASE("lu_features: pass-through, sign symmetry break, full square")
{
    LuFeatureMap empty;
    Eigen::VectorXd r(2);
    r << 0.5, -0.5;
    CHECK(lu_features(r, empty).isApprox(r, 0.0));

    LuFeatureMap second;
    second.squared_indices = {1};
    const Eigen::VectorXd f = lu_features(r, second);
    CHECK(f(0) == 0.5);
    CHECK(f(1) == 0.25);
    const Eigen::VectorXd g = lu_features(-r, second);
    CHECK(g(0) == -0.5);
    CHECK(g(1) == 0.25);  // not -f: the reflected series is no longer a solution

    LuFeatureMap all;
    all.squared_indices = {0, 1};
    CHECK(lu_features(r, all).isApprox(r.cwiseProduct(r), 0.0));
}

TEST_CASE("lu_features: second_half covers [N/2, N)")
{
    const LuFeatureMap map = LuFeatureMap::second_half(5);
    CHECK(map.squared_indices == std::vector<int>{2, 3, 4});
}

TEST_CASE("train_readout: zero targets give exactly zero weights")
{
    Harvest h;
    h.R = Eigen::MatrixXd::Random(6, 12);
    h.targets = Eigen::MatrixXd::Zero(2, 12);
    const TrainedReadout ro = train_readout(h, 1e-6, LuFeatureMap::second_half(6));
    CHECK(ro.W_out.isZero(0.0));
}

TEST_CASE("train_readout: matches the explicit normal-equation oracle")
{
    Eigen::MatrixXd R(5, 8), Y(2, 8);
    // Fixed arbitrary values; the oracle inverts the regularized Gram matrix
    // directly.
    R << 0.21, -0.73, 0.44, 0.12, -0.58, 0.91, -0.33, 0.05,
         0.64, 0.17, -0.25, 0.83, 0.02, -0.47, 0.56, -0.88,
         -0.39, 0.52, 0.78, -0.11, 0.29, 0.04, -0.65, 0.37,
         0.08, -0.26, 0.14, 0.61, -0.72, 0.45, 0.22, -0.09,
         0.55, 0.31, -0.48, 0.27, 0.66, -0.13, 0.09, 0.74;
    Y << 0.42, -0.15, 0.68, 0.04, -0.52, 0.77, 0.23, -0.36,
         -0.61, 0.29, 0.11, -0.44, 0.58, 0.06, -0.19, 0.85;

    const LuFeatureMap map = LuFeatureMap::second_half(5);
    Harvest h;
    h.R = R;
    h.targets = Y;
    const double k = 1e-3;
    const TrainedReadout ro = train_readout(h, k, map);

    Eigen::MatrixXd F = R;
    for (int idx : map.squared_indices) F.row(idx) = F.row(idx).array().square();
    const Eigen::MatrixXd gram =
        F * F.transpose() + k * Eigen::MatrixXd::Identity(5, 5);
    const Eigen::MatrixXd oracle = Y * F.transpose() * gram.inverse();
    CHECK((ro.W_out - oracle).norm() / oracle.norm() <= 1e-10);
}

TEST_CASE("train_readout: weight norm is non-increasing in the ridge parameter")
{
    EsnConfig cfg;
    cfg.N = 40;
    cfg.n = 3;
    cfg.s = 1.0;
    cfg.sigma_A2 = 1.0 / 40.0;
    cfg.sigma_in2 = 0.3;
    cfg.seed = 12;
    const Reservoir res = build_reservoir(cfg);
    const TimeSeries input = generate_series(OdeSystem::lorenz63(), 0.1, 300, 9);
    const Harvest h = harvest(res, input, 50, 200);

    const LuFeatureMap map = LuFeatureMap::second_half(40);
    double prev = std::numeric_limits<double>::infinity();
    for (double k : {1e-4, 1e-2, 1.0, 1e2, 1e4}) {
        const double norm = train_readout(h, k, map).W_out.norm();
        CHECK(norm <= prev);
        prev = norm;
    }
}

TEST_CASE("train_readout: k = 0 on a singular Gram matrix names the fix")
{
    Harvest h;
    h.R = Eigen::MatrixXd::Zero(4, 6);
    h.R.row(0).setConstant(1.0);
    h.R.row(1).setConstant(1.0);  // rank 1: singular Gram
    h.targets = Eigen::MatrixXd::Random(1, 6);
    CHECK_THROWS_AS(train_readout(h, 0.0, LuFeatureMap{}), singularity_error);
}

TEST_CASE("train_readout: deterministic end to end")
{
    EsnConfig cfg;
    cfg.N = 50;
    cfg.n = 3;
    cfg.s = 0.8;
    cfg.sigma_A2 = 0.02;
    cfg.sigma_in2 = 0.4;
    cfg.seed = 99;
    const TimeSeries input = generate_series(OdeSystem::lorenz63(), 0.1, 400, 5);
    auto once = [&]() {
        const Reservoir res = build_reservoir(cfg);
        const Harvest h = harvest(res, input, 100, 250);
        return train_readout(h, 1e-4, LuFeatureMap::second_half(50)).W_out;
    };
    CHECK(once().isApprox(once(), 0.0));
}

TEST_CASE("predict_closed_loop: zero readout from zero state stays zero")
{
    EsnConfig cfg;
    cfg.N = 8;
    cfg.n = 2;
    cfg.s = 0.5;
    cfg.sigma_A2 = 0.05;
    cfg.sigma_in2 = 0.2;
    cfg.seed = 14;
    const Reservoir res = build_reservoir(cfg);
    TrainedReadout ro;
    ro.W_out = Eigen::MatrixXd::Zero(2, 8);
    ro.feature_map = LuFeatureMap::second_half(8);
    const Prediction pred =
        predict_closed_loop(res, ro, Eigen::VectorXd::Zero(8), 20);
    CHECK_FALSE(pred.diverged);
    CHECK(pred.series.samples.isZero(0.0));
}

TEST_CASE("predict_closed_loop: first step equals open loop when v(0) matches u(t)")
{
    EsnConfig cfg;
    cfg.N = 12;
    cfg.n = 1;
    cfg.s = 1.0;
    cfg.sigma_A2 = 0.02;
    cfg.sigma_in2 = 0.3;
    cfg.seed = 15;
    const Reservoir res = build_reservoir(cfg);

    Eigen::VectorXd r_init = Eigen::VectorXd::LinSpaced(12, -0.4, 0.4);
    TrainedReadout ro;
    ro.W_out = Eigen::MatrixXd::Random(1, 12);
    ro.feature_map = LuFeatureMap::second_half(12);
    const double v0 = (ro.W_out * lu_features(r_init, ro.feature_map))(0);

    // Open loop fed with exactly v0 must produce the same next state.
    TimeSeries one;
    one.dt = 1.0;
    one.samples.resize(1, 1);
    one.samples << v0;
    const auto open = drive(res, one, r_init);

    const Prediction pred = predict_closed_loop(res, ro, r_init, 2);
    const Eigen::VectorXd r1 = open[1];
    const double v1 = (ro.W_out * lu_features(r1, ro.feature_map))(0);
    CHECK(pred.series.samples(0, 0) == doctest::Approx(v0).epsilon(1e-15));
    CHECK(pred.series.samples(0, 1) == doctest::Approx(v1).epsilon(1e-15));
}

TEST_CASE("predict_closed_loop: blow-up is flagged in-band, not thrown")
{
    EsnConfig cfg;
    cfg.N = 8;
    cfg.n = 1;
    cfg.s = 1.0;
    cfg.sigma_A2 = 0.1;
    cfg.sigma_in2 = 0.1;
    cfg.seed = 16;
    const Reservoir res = build_reservoir(cfg);
    TrainedReadout ro;
    ro.W_out = Eigen::MatrixXd::Constant(1, 8, 1e7);
    ro.feature_map = LuFeatureMap{};
    const Prediction pred =
        predict_closed_loop(res, ro, Eigen::VectorXd::Constant(8, 0.5), 10);
    CHECK(pred.diverged);
    CHECK(pred.diverged_at == 0);
    CHECK(pred.series.samples.cols() == 0);
}

TEST_CASE("serialization: reservoir and readout survive the JSON round trip")
{
    EsnConfig cfg;
    cfg.N = 9;
    cfg.n = 2;
    cfg.s = 0.6;
    cfg.sigma_A2 = 0.3;
    cfg.sigma_in2 = 0.7;
    cfg.seed = 4242;
    const Reservoir res = build_reservoir(cfg);
    const Reservoir back = reservoir_from_json(reservoir_to_json(res));
    CHECK(back.A.isApprox(res.A, 0.0));
    CHECK(back.W_in.isApprox(res.W_in, 0.0));
    CHECK(back.seed == res.seed);
    CHECK(back.s == res.s);

    TrainedReadout ro;
    ro.W_out = Eigen::MatrixXd::Random(2, 9);
    ro.ridge_k = 0.25;
    ro.feature_map = LuFeatureMap::second_half(9);
    const TrainedReadout ro_back = readout_from_json(readout_to_json(ro));
    CHECK(ro_back.W_out.isApprox(ro.W_out, 0.0));
    CHECK(ro_back.ridge_k == 0.25);
    CHECK(ro_back.feature_map.squared_indices == ro.feature_map.squared_indices);
}
