#include "reslab/esn.hpp"

#include "reslab/errors.hpp"
#include "reslab/rng.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace reslab {

Reservoir build_reservoir(const EsnConfig& config)
{
    if (config.N < 1 || config.n < 1)
        throw config_error("build_reservoir: N and n must be >= 1");
    if (config.s < 0.0 || config.s > 1.0)
        throw config_error("build_reservoir: s must lie in [0, 1]");
    if (config.sigma_A2 < 0.0 || config.sigma_in2 < 0.0)
        throw config_error("build_reservoir: variances must be >= 0");

    Reservoir res;
    res.N = config.N;
    res.n = config.n;
    res.s = config.s;
    res.sigma_A2 = config.sigma_A2;
    res.sigma_in2 = config.sigma_in2;
    res.seed = config.seed;

    const double sd_A = std::sqrt(config.sigma_A2);
    const double sd_in = std::sqrt(config.sigma_in2);

    // One stream, fixed draw order (row-major, A then W_in): the reservoir
    // is bit-identical for a given seed.
    Rng rng(mix_seed({config.seed, 0x7265736572ULL}));
    res.A.setZero(config.N, config.N);
    for (int i = 0; i < config.N; ++i)
        for (int j = 0; j < config.N; ++j)
            if (rng.uniform01() < config.s) res.A(i, j) = rng.gaussian(0.0, sd_A);

    res.W_in.resize(config.N, config.n);
    for (int i = 0; i < config.N; ++i)
        for (int j = 0; j < config.n; ++j) res.W_in(i, j) = rng.gaussian(0.0, sd_in);

    return res;
}

LuFeatureMap LuFeatureMap::second_half(int N)
{
    LuFeatureMap map;
    for (int i = N / 2; i < N; ++i) map.squared_indices.push_back(i);
    return map;
}

Eigen::VectorXd lu_features(const Eigen::VectorXd& r, const LuFeatureMap& map)
{
    Eigen::VectorXd f = r;
    for (int idx : map.squared_indices) f(idx) = r(idx) * r(idx);
    return f;
}

std::vector<Eigen::VectorXd> drive(const Reservoir& res, const TimeSeries& input,
                                   const Eigen::VectorXd& r0)
{
    if (input.components() != res.n)
        throw config_error("drive: input has wrong number of components");
    if (r0.size() != res.N) throw config_error("drive: r0 has wrong dimension");

    std::vector<Eigen::VectorXd> states;
    states.reserve(input.length() + 1);
    states.push_back(r0);
    Eigen::VectorXd r = r0;
    for (Eigen::Index t = 0; t < input.length(); ++t) {
        r = (res.A * r + res.W_in * input.samples.col(t)).array().tanh();
        states.push_back(r);
    }
    return states;
}

Harvest harvest(const Reservoir& res, const TimeSeries& input, int warmup, int t_max,
                const Eigen::VectorXd& r0)
{
    if (input.components() != res.n)
        throw config_error("harvest: input has wrong number of components");
    if (warmup < 0 || t_max < 1) throw config_error("harvest: bad warmup or t_max");
    if (input.length() < warmup + t_max + 1)
        throw config_error("harvest: input too short for warmup + t_max + 1");

    if (r0.size() != 0 && r0.size() != res.N)
        throw config_error("harvest: r0 has wrong dimension");
    Eigen::VectorXd r = r0.size() == res.N ? r0 : Eigen::VectorXd::Zero(res.N).eval();

    for (int g = 0; g < warmup; ++g)
        r = (res.A * r + res.W_in * input.samples.col(g)).array().tanh();

    Harvest h;
    h.warmup_used = warmup;
    h.R.resize(res.N, t_max);
    h.targets.resize(res.n, t_max);
    h.R.col(0) = r;
    h.targets.col(0) = input.samples.col(warmup);
    for (int t = 1; t < t_max; ++t) {
        r = (res.A * r + res.W_in * input.samples.col(warmup + t - 1)).array().tanh();
        h.R.col(t) = r;
        h.targets.col(t) = input.samples.col(warmup + t);
    }
    // One more step so r_final has seen the last target; closed-loop
    // prediction started there continues the series at the first unseen sample.
    r = (res.A * r + res.W_in * input.samples.col(warmup + t_max - 1)).array().tanh();
    h.r_final = r;
    return h;
}

TrainedReadout train_readout(const Harvest& h, double k, const LuFeatureMap& map)
{
    if (k < 0.0) throw config_error("train_readout: ridge k must be >= 0");
    if (h.R.cols() < 1) throw config_error("train_readout: empty harvest");

    const Eigen::Index N = h.R.rows();
    Eigen::MatrixXd F = h.R;
    for (int idx : map.squared_indices) F.row(idx) = F.row(idx).array().square();

    Eigen::MatrixXd gram = F * F.transpose();
    gram.diagonal().array() += k;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    const double dmin = d.cwiseAbs().minCoeff();
    if (k == 0.0 &&
        (ldlt.info() != Eigen::Success || dmin <= dmax * N * 1e-16))
        throw singularity_error(
            "train_readout: F F^T is singular; use a ridge parameter k > 0");

    TrainedReadout ro;
    ro.ridge_k = k;
    ro.feature_map = map;
    ro.W_out = ldlt.solve(F * h.targets.transpose()).transpose();
    return ro;
}

Prediction predict_closed_loop(const Reservoir& res, const TrainedReadout& ro,
                               const Eigen::VectorXd& r_init, long steps, double dt)
{
    if (ro.W_out.cols() != res.N || ro.W_out.rows() != res.n)
        throw config_error("predict_closed_loop: readout shape mismatch");
    if (r_init.size() != res.N)
        throw config_error("predict_closed_loop: r_init has wrong dimension");

    Prediction pred;
    pred.series.dt = dt;
    pred.series.samples.resize(res.n, steps);

    Eigen::VectorXd r = r_init;
    Eigen::VectorXd v = ro.W_out * lu_features(r, ro.feature_map);
    for (long t = 0; t < steps; ++t) {
        if (!v.allFinite() || v.cwiseAbs().maxCoeff() > kDivergenceGuard) {
            pred.diverged = true;
            pred.diverged_at = t;
            pred.series.samples.conservativeResize(res.n, t);
            return pred;
        }
        pred.series.samples.col(t) = v;
        r = (res.A * r + res.W_in * v).array().tanh();
        v = ro.W_out * lu_features(r, ro.feature_map);
    }
    return pred;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m)
{
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j)
{
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw config_error("matrix_from_json: size mismatch");
    Eigen::MatrixXd m(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j2 = 0; j2 < cols; ++j2) m(i, j2) = data[k++];
    return m;
}

}  // namespace

std::string reservoir_to_json(const Reservoir& res)
{
    nlohmann::json j{{"N", res.N},
                     {"n", res.n},
                     {"s", res.s},
                     {"sigma_A2", res.sigma_A2},
                     {"sigma_in2", res.sigma_in2},
                     {"seed", res.seed},
                     {"A", matrix_to_json(res.A)},
                     {"W_in", matrix_to_json(res.W_in)}};
    return j.dump();
}

Reservoir reservoir_from_json(const std::string& text)
{
    const nlohmann::json j = nlohmann::json::parse(text);
    Reservoir res;
    res.N = j.at("N").get<int>();
    res.n = j.at("n").get<int>();
    res.s = j.at("s").get<double>();
    res.sigma_A2 = j.at("sigma_A2").get<double>();
    res.sigma_in2 = j.at("sigma_in2").get<double>();
    res.seed = j.at("seed").get<std::uint64_t>();
    res.A = matrix_from_json(j.at("A"));
    res.W_in = matrix_from_json(j.at("W_in"));
    if (res.A.rows() != res.N || res.A.cols() != res.N || res.W_in.rows() != res.N ||
        res.W_in.cols() != res.n)
        throw config_error("reservoir_from_json: inconsistent dimensions");
    return res;
}

std::string readout_to_json(const TrainedReadout& ro)
{
    nlohmann::json j{{"W_out", matrix_to_json(ro.W_out)},
                     {"ridge_k", ro.ridge_k},
                     {"squared_indices", ro.feature_map.squared_indices}};
    return j.dump();
}

TrainedReadout readout_from_json(const std::string& text)
{
    const nlohmann::json j = nlohmann::json::parse(text);
    TrainedReadout ro;
    ro.W_out = matrix_from_json(j.at("W_out"));
    ro.ridge_k = j.at("ridge_k").get<double>();
    ro.feature_map.squared_indices = j.at("squared_indices").get<std::vector<int>>();
    return ro;
}

}  // namespace reslab
