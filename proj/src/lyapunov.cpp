#include "reslab/lyapunov.hpp"

#include "reslab/errors.hpp"
#include "reslab/rng.hpp"

#include <cmath>
#include <numeric>

namespace reslab {

TangentOperator jacobian_factor(const Reservoir& res, const Eigen::VectorXd& r,
                                const Eigen::VectorXd& u)
{
    if (r.size() != res.N || u.size() != res.n)
        throw config_error("jacobian_factor: dimension mismatch");
    const Eigen::VectorXd b = res.A * r + res.W_in * u;
    TangentOperator op;
    op.A = &res.A;
    op.d = 1.0 - b.array().tanh().square();
    return op;
}

namespace {

/// Split-half agreement on the accumulated per-step log stretches.
bool halves_agree(const std::vector<double>& cumsum, double tol, double* estimate)
{
    const std::size_t t = cumsum.size();
    if (t < 64) return false;
    const std::size_t half = t / 2;
    const double first = cumsum[half - 1] / static_cast<double>(half);
    const double second =
        (cumsum[t - 1] - cumsum[half - 1]) / static_cast<double>(t - half);
    *estimate = cumsum[t - 1] / static_cast<double>(t);
    return std::abs(first - second) < tol;
}

LyapunovEstimate floored_estimate(double tol)
{
    LyapunovEstimate est;
    est.lambda = kLambdaFloor;
    est.converged = true;
    est.tolerance = tol;
    return est;
}

}  // namespace

LyapunovEstimate training_lyapunov_qr(const Reservoir& res, const TimeSeries& input,
                                      ExponentKind kind, long steps, long warmup,
                                      double tol, std::uint64_t tangent_seed)
{
    if (kind == ExponentKind::ClosedLoop)
        throw config_error("training_lyapunov_qr: use closed_loop_lyapunov");
    const bool driven = kind == ExponentKind::Driven;
    if (driven && input.components() != res.n)
        throw config_error("training_lyapunov_qr: input has wrong dimension");
    if (steps < 1) throw config_error("training_lyapunov_qr: steps must be >= 1");

    if (res.A.isZero(0.0)) return floored_estimate(tol);

    Rng rng(mix_seed({res.seed, 0x7172ULL, tangent_seed}));

    // Undriven runs start from a small random state so supercritical
    // reservoirs settle onto their self-sustained attractor instead of the
    // unstable zero fixed point; driven runs synchronize from zero.
    Eigen::VectorXd r = Eigen::VectorXd::Zero(res.N);
    if (!driven)
        for (int i = 0; i < res.N; ++i) r(i) = 0.1 * rng.gaussian();

    const Eigen::Index T = input.length();
    auto input_col = [&](long g) -> Eigen::VectorXd {
        if (!driven || T == 0) return Eigen::VectorXd::Zero(res.n);
        return input.samples.col(g % T);
    };

    for (long g = 0; g < warmup; ++g)
        r = (res.A * r + res.W_in * input_col(g)).array().tanh();

    Eigen::VectorXd v(res.N);
    for (int i = 0; i < res.N; ++i) v(i) = rng.gaussian();
    v.normalize();

    LyapunovEstimate est;
    est.tolerance = tol;
    std::vector<double> cumsum;
    cumsum.reserve(steps);
    double running = 0.0;

    Eigen::MatrixXd pair(res.N, 2);
    Eigen::MatrixXd image(res.N, 2);
    const long check_every = 256;
    for (long t = 0; t < steps; ++t) {
        pair.col(0) = r;
        pair.col(1) = v;
        image.noalias() = res.A * pair;  // one pass over A for state and tangent

        const Eigen::VectorXd b = image.col(0) + res.W_in * input_col(warmup + t);
        const Eigen::ArrayXd tanh_b = b.array().tanh();
        const Eigen::VectorXd z = (1.0 - tanh_b.square()).matrix().cwiseProduct(image.col(1));
        const double growth = z.norm();
        if (growth == 0.0) {
            est.lambda = kLambdaFloor;
            est.converged = true;
            est.steps_used = t + 1;
            return est;
        }
        running += std::log(growth);
        cumsum.push_back(running);
        v = z / growth;
        r = tanh_b.matrix();

        if ((t + 1) % check_every == 0) {
            double estimate = 0.0;
            const bool ok = halves_agree(cumsum, tol, &estimate);
            est.running_sequence.push_back(estimate);
            if (ok) {
                est.lambda = std::max(estimate, kLambdaFloor);
                est.converged = true;
                est.steps_used = t + 1;
                return est;
            }
        }
    }

    est.steps_used = steps;
    est.lambda = std::max(cumsum.back() / static_cast<double>(steps), kLambdaFloor);
    double estimate = 0.0;
    est.converged = halves_agree(cumsum, tol, &estimate);
    return est;
}

LyapunovEstimate closed_loop_lyapunov(const Reservoir& res, const TrainedReadout& ro,
                                      const Eigen::VectorXd& r_init, long steps,
                                      double tol, std::uint64_t tangent_seed)
{
    if (ro.W_out.cols() != res.N || ro.W_out.rows() != res.n)
        throw config_error("closed_loop_lyapunov: readout shape mismatch");
    if (r_init.size() != res.N)
        throw config_error("closed_loop_lyapunov: r_init has wrong dimension");

    Rng rng(mix_seed({res.seed, 0x636c71ULL, tangent_seed}));
    Eigen::VectorXd r = r_init;
    Eigen::VectorXd v(res.N);
    for (int i = 0; i < res.N; ++i) v(i) = rng.gaussian();
    v.normalize();

    LyapunovEstimate est;
    est.tolerance = tol;
    std::vector<double> cumsum;
    cumsum.reserve(steps);
    double running = 0.0;

    Eigen::MatrixXd pair(res.N, 2);
    Eigen::MatrixXd image(res.N, 2);
    const long check_every = 256;
    for (long t = 0; t < steps; ++t) {
        // Lu chain rule: squared components feed 2 r_j into the tangent.
        Eigen::VectorXd f = r;
        Eigen::VectorXd fprime_v = v;
        for (int idx : ro.feature_map.squared_indices) {
            f(idx) = r(idx) * r(idx);
            fprime_v(idx) = 2.0 * r(idx) * v(idx);
        }
        const Eigen::VectorXd out = ro.W_out * f;
        if (!out.allFinite() || out.cwiseAbs().maxCoeff() > kDivergenceGuard)
            throw divergence_error("closed_loop_lyapunov: prediction diverged", t);

        pair.col(0) = r;
        pair.col(1) = v;
        image.noalias() = res.A * pair;

        const Eigen::VectorXd b = image.col(0) + res.W_in * out;
        const Eigen::ArrayXd tanh_b = b.array().tanh();
        const Eigen::VectorXd z =
            (1.0 - tanh_b.square()).matrix().cwiseProduct(
                image.col(1) + res.W_in * (ro.W_out * fprime_v));
        const double growth = z.norm();
        if (growth == 0.0) {
            est.lambda = kLambdaFloor;
            est.converged = true;
            est.steps_used = t + 1;
            return est;
        }
        running += std::log(growth);
        cumsum.push_back(running);
        v = z / growth;
        r = tanh_b.matrix();

        if ((t + 1) % check_every == 0) {
            double estimate = 0.0;
            const bool ok = halves_agree(cumsum, tol, &estimate);
            est.running_sequence.push_back(estimate);
            if (ok) {
                est.lambda = std::max(estimate, kLambdaFloor);
                est.converged = true;
                est.steps_used = t + 1;
                return est;
            }
        }
    }

    est.steps_used = steps;
    est.lambda = std::max(cumsum.back() / static_cast<double>(steps), kLambdaFloor);
    double estimate = 0.0;
    est.converged = halves_agree(cumsum, tol, &estimate);
    return est;
}

}  // namespace reslab
