#include "reslab/dynamics.hpp"

#include "reslab/errors.hpp"
#include "reslab/rng.hpp"

#include <algorithm>
#include <cmath>

namespace reslab {

Vec3 OdeSystem::derivative(const Vec3& v) const
{
    const double x = v(0), y = v(1), z = v(2);
    switch (kind) {
        case SystemKind::Lorenz63:
            return {sigma * (y - x), x * (rho - z) - y, x * y - beta * z};
        case SystemKind::Halvorsen:
            return {-a * x - 4.0 * (y + z) - y * y,
                    -a * y - 4.0 * (z + x) - z * z,
                    -a * z - 4.0 * (x + y) - x * x};
    }
    return Vec3::Zero();
}

Mat3 OdeSystem::jacobian(const Vec3& v) const
{
    const double x = v(0), y = v(1), z = v(2);
    Mat3 j;
    switch (kind) {
        case SystemKind::Lorenz63:
            j << -sigma, sigma, 0.0,
                 rho - z, -1.0, -x,
                 y, x, -beta;
            return j;
        case SystemKind::Halvorsen:
            j << -a, -4.0 - 2.0 * y, -4.0,
                 -4.0, -a, -4.0 - 2.0 * z,
                 -4.0 - 2.0 * x, -4.0, -a;
            return j;
    }
    return Mat3::Zero();
}

double attractor_lambda1(const OdeSystem& system)
{
    switch (system.kind) {
        case SystemKind::Lorenz63: return 0.901;
        case SystemKind::Halvorsen: return 0.69;
    }
    return 0.0;
}

namespace {

Vec3 rk4_step(const VectorField& field, const Vec3& x, double h)
{
    const Vec3 k1 = field(x);
    const Vec3 k2 = field(x + 0.5 * h * k1);
    const Vec3 k3 = field(x + 0.5 * h * k2);
    const Vec3 k4 = field(x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Trajectory integrate_field(const VectorField& field, const Vec3& x0, double h,
                           double t_total)
{
    if (!(h > 0.0)) throw config_error("integrate: step h must be positive");
    if (!(t_total >= h)) throw config_error("integrate: t_total must be >= h");
    if (!x0.allFinite()) throw config_error("integrate: initial state not finite");

    const long steps = static_cast<long>(std::floor(t_total / h + 1e-9));
    Trajectory traj;
    traj.inner_step = h;
    traj.t_total = t_total;
    traj.states.reserve(steps + 1);
    traj.states.push_back(x0);
    Vec3 x = x0;
    for (long i = 0; i < steps; ++i) {
        x = rk4_step(field, x, h);
        if (!x.allFinite()) throw divergence_error("integrate: state diverged", i + 1);
        traj.states.push_back(x);
    }
    return traj;
}

Trajectory integrate(const OdeSystem& system, const Vec3& x0, double h, double t_total)
{
    return integrate_field([&system](const Vec3& x) { return system.derivative(x); },
                           x0, h, t_total);
}

TimeSeries sample(const Trajectory& traj, double dt)
{
    const double h = traj.inner_step;
    const double ratio = dt / h;
    const long stride = std::lround(ratio);
    if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio)
        throw config_error("sample: dt must be an integer multiple of the inner step");

    const long total = static_cast<long>(traj.states.size());
    const long count = (total - 1) / stride + 1;
    TimeSeries series;
    series.dt = dt;
    series.samples.resize(3, count);
    for (long c = 0; c < count; ++c) series.samples.col(c) = traj.states[c * stride];
    return series;
}

namespace {

Eigen::VectorXd component_stddevs_of(const Eigen::MatrixXd& samples)
{
    const Eigen::Index n = samples.rows();
    const double T = static_cast<double>(samples.cols());
    Eigen::VectorXd sd(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double m = samples.row(i).mean();
        sd(i) = std::sqrt((samples.row(i).array() - m).square().sum() / T);
    }
    return sd;
}

}  // namespace

TimeSeries normalize(const TimeSeries& series)
{
    if (series.length() < 2) throw config_error("normalize: need at least two samples");
    const Eigen::VectorXd sd = component_stddevs_of(series.samples);
    const double scale = sd.maxCoeff();
    if (scale <= 0.0)
        throw degenerate_error("normalize: every component has zero variance");

    TimeSeries out;
    out.dt = series.dt;
    out.samples = series.samples / scale;
    out.normalization_scale = scale;
    out.component_stddevs = component_stddevs_of(out.samples);
    return out;
}

TimeSeries select_components(const TimeSeries& series, const std::vector<int>& indices)
{
    if (indices.empty()) throw config_error("select_components: empty index list");
    TimeSeries out;
    out.dt = series.dt;
    out.normalization_scale = series.normalization_scale;
    out.samples.resize(static_cast<Eigen::Index>(indices.size()), series.length());
    if (series.component_stddevs.size() == series.components())
        out.component_stddevs.resize(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const int idx = indices[k];
        if (idx < 0 || idx >= series.components())
            throw config_error("select_components: index out of range");
        out.samples.row(static_cast<Eigen::Index>(k)) = series.samples.row(idx);
        if (out.component_stddevs.size() > 0)
            out.component_stddevs(static_cast<Eigen::Index>(k)) =
                series.component_stddevs(idx);
    }
    return out;
}

Eigen::Vector3d lyapunov_spectrum_field(const VectorField& field,
                                        const JacobianField& jacobian, const Vec3& x0,
                                        double h, double t_total, double renorm_interval)
{
    if (!(h > 0.0) || !(t_total >= h))
        throw config_error("lyapunov_spectrum: bad step or duration");

    // State and tangent frame integrated together: dM/dt = J(x) M.
    Vec3 x = x0;
    Mat3 frame = Mat3::Identity();
    Eigen::Vector3d sums = Eigen::Vector3d::Zero();

    auto rhs = [&](const Vec3& s, const Mat3& m, Vec3& ds, Mat3& dm) {
        ds = field(s);
        dm = jacobian(s) * m;
    };

    const long steps = static_cast<long>(std::floor(t_total / h + 1e-9));
    const long renorm_every = std::max(1L, std::lround(renorm_interval / h));
    double accumulated_time = 0.0;

    for (long i = 0; i < steps; ++i) {
        Vec3 k1x, k2x, k3x, k4x;
        Mat3 k1m, k2m, k3m, k4m;
        rhs(x, frame, k1x, k1m);
        rhs(x + 0.5 * h * k1x, frame + 0.5 * h * k1m, k2x, k2m);
        rhs(x + 0.5 * h * k2x, frame + 0.5 * h * k2m, k3x, k3m);
        rhs(x + h * k3x, frame + h * k3m, k4x, k4m);
        x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        frame += (h / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
        if (!x.allFinite() || !frame.allFinite())
            throw divergence_error("lyapunov_spectrum: diverged", i + 1);

        if ((i + 1) % renorm_every == 0 || i + 1 == steps) {
            // Modified Gram-Schmidt; log column norms accumulate the exponents.
            for (int c = 0; c < 3; ++c) {
                for (int p = 0; p < c; ++p)
                    frame.col(c) -= frame.col(p).dot(frame.col(c)) * frame.col(p);
                const double norm = frame.col(c).norm();
                sums(c) += std::log(norm);
                frame.col(c) /= norm;
            }
            accumulated_time = (i + 1) * h;
        }
    }

    Eigen::Vector3d exponents = sums / accumulated_time;
    std::sort(exponents.data(), exponents.data() + 3, std::greater<double>());
    return exponents;
}

Eigen::Vector3d lyapunov_spectrum(const OdeSystem& system, const Vec3& x0, double h,
                                  double t_total, double renorm_interval)
{
    return lyapunov_spectrum_field(
        [&system](const Vec3& x) { return system.derivative(x); },
        [&system](const Vec3& x) { return system.jacobian(x); }, x0, h, t_total,
        renorm_interval);
}

TimeSeries gaussian_input(Eigen::Index T, std::uint64_t seed)
{
    if (T < 1) throw config_error("gaussian_input: T must be >= 1");
    Rng rng(mix_seed({seed, 0x6761757373ULL}));
    TimeSeries series;
    series.dt = 1.0;
    series.samples.resize(1, T);
    for (Eigen::Index t = 0; t < T; ++t) series.samples(0, t) = rng.gaussian();
    series.component_stddevs = component_stddevs_of(series.samples);
    return series;
}

TimeSeries generate_series(const OdeSystem& system, double dt, Eigen::Index n_samples,
                           std::uint64_t seed, double h, double burn_in)
{
    Rng rng(mix_seed({seed, 0x7472616aULL}));
    const Vec3 x0{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const double t_need = burn_in + dt * static_cast<double>(n_samples + 1);
    const Trajectory traj = integrate(system, x0, h, t_need);

    const long skip = std::lround(burn_in / h);
    Trajectory on_attractor;
    on_attractor.inner_step = h;
    on_attractor.t_total = t_need - burn_in;
    on_attractor.states.assign(traj.states.begin() + skip, traj.states.end());
    TimeSeries series = sample(on_attractor, dt);
    if (series.length() > n_samples)
        series.samples.conservativeResize(3, n_samples);
    return normalize(series);
}

}  // namespace reslab
