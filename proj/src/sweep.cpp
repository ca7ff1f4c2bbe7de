#include "reslab/sweep.hpp"

#include "reslab/errors.hpp"
#include "reslab/lyapunov.hpp"
#include "reslab/meanfield.hpp"
#include "reslab/rng.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace reslab {

std::vector<double> log_spaced(double lo, double hi, int count)
{
    if (!(lo > 0.0) || !(hi > lo) || count < 2)
        throw config_error("log_spaced: need 0 < lo < hi and count >= 2");
    std::vector<double> out(count);
    const double step = (std::log(hi) - std::log(lo)) / (count - 1);
    for (int k = 0; k < count; ++k) out[k] = std::exp(std::log(lo) + step * k);
    out.front() = lo;
    out.back() = hi;
    return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int task_input_dimension(const SweepSpec& spec)
{
    return spec.task == TaskKind::FullInfo ? 3 : 1;
}

void validate(const SweepSpec& spec)
{
    if (spec.gA2_axis.empty() || spec.nsin2_axis.empty())
        throw config_error("sweep: empty axis");
    for (const auto* axis : {&spec.gA2_axis, &spec.nsin2_axis})
        for (std::size_t k = 0; k < axis->size(); ++k) {
            if ((*axis)[k] < 0.0) throw config_error("sweep: negative axis value");
            if (k > 0 && (*axis)[k] <= (*axis)[k - 1])
                throw config_error("sweep: axes must be strictly increasing");
        }
    if (spec.trials < 1) throw config_error("sweep: trials must be >= 1");
}

}  // namespace

TrialRecord run_cell(const SweepSpec& spec, std::size_t i, std::size_t j, int trial)
{
    validate(spec);
    if (i >= spec.gA2_axis.size() || j >= spec.nsin2_axis.size())
        throw config_error("run_cell: cell index out of range");

    TrialRecord rec;
    rec.lambda_qr = rec.lambda_mf = rec.rank = rec.mc = kNaN;
    try {
        const double gA2 = spec.gA2_axis[i];
        const double nsin2 = spec.nsin2_axis[j];
        const int n = task_input_dimension(spec);
        const double lambda1 = attractor_lambda1(spec.system);

        EsnConfig cfg = spec.esn_template;
        cfg.n = n;
        cfg.sigma_A2 = gA2 / (cfg.s * cfg.N);
        cfg.sigma_in2 = nsin2 / n;
        cfg.seed = mix_seed({spec.base_seed, static_cast<std::uint64_t>(i),
                             static_cast<std::uint64_t>(j),
                             static_cast<std::uint64_t>(trial)});
        const int t_max = cfg.train_steps > 0
                              ? cfg.train_steps
                              : static_cast<int>(std::lround(200.0 / (lambda1 * spec.dt)));
        const long horizon = std::lround(spec.horizon_lyapunov_times / (lambda1 * spec.dt));
        const Eigen::Index need = cfg.warmup_steps + t_max + 1 + horizon + 1;

        const TimeSeries full = generate_series(spec.system, spec.dt, need, cfg.seed);
        const TimeSeries input =
            spec.task == TaskKind::FullInfo
                ? full
                : select_components(full, {spec.partial_component});

        const Reservoir res = build_reservoir(cfg);
        const Harvest h = harvest(res, input, cfg.warmup_steps, t_max);
        const TrainedReadout ro =
            train_readout(h, cfg.ridge_k, LuFeatureMap::second_half(cfg.N));
        const Prediction pred = predict_closed_loop(res, ro, h.r_final, horizon, spec.dt);

        TimeSeries target = input;
        target.samples = input.samples.middleCols(cfg.warmup_steps + t_max, horizon);
        const ValidTime vt = score_prediction(pred, target, spec.threshold, lambda1);

        // Diverged trials count as zero valid time; the divergence fraction
        // is reported alongside.
        rec.valid_time = vt.diverged ? 0.0 : vt.lyapunov_times;
        rec.censored = vt.censored;
        rec.diverged = vt.diverged;

        if (spec.metrics.lambda_qr)
            rec.lambda_qr = training_lyapunov_qr(res, input, ExponentKind::Driven,
                                                 spec.qr_steps, 500).lambda;
        if (spec.metrics.lambda_mf)
            rec.lambda_mf =
                meanfield_lyapunov(MeanFieldInput::from_series(gA2, cfg.sigma_in2, input));
        if (spec.metrics.rank) rec.rank = numerical_rank(h.R, spec.rank_rel_tol);
        if (spec.metrics.mc) {
            EsnConfig mc_cfg = cfg;
            mc_cfg.n = 1;
            mc_cfg.sigma_in2 = nsin2;  // scalar input keeps n sigma_in^2 fixed
            mc_cfg.seed = mix_seed({cfg.seed, 0x6d63ULL});
            const Reservoir mc_res = build_reservoir(mc_cfg);
            const int tau_max = 2 * cfg.N;
            const long T = 10L * tau_max + 1000;
            rec.mc = memory_capacity(mc_res, T, tau_max, 1e-8, mc_cfg.seed).mc_total;
        }
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
    }
    return rec;
}

CellStats reduce_trials(const std::vector<TrialRecord>& records, const MetricSet& metrics)
{
    CellStats stats;
    std::vector<const TrialRecord*> ok;
    for (const TrialRecord& r : records)
        if (!r.failed) ok.push_back(&r);
    stats.trials_completed = static_cast<int>(ok.size());
    if (ok.empty()) return stats;

    int diverged = 0;
    for (const TrialRecord* r : ok)
        if (r->diverged) ++diverged;
    stats.diverged_frac = static_cast<double>(diverged) / static_cast<double>(ok.size());

    auto reduce = [&](const std::string& name, auto getter) {
        std::vector<double> xs;
        for (const TrialRecord* r : ok) {
            const double v = getter(*r);
            if (std::isfinite(v)) xs.push_back(v);
        }
        if (xs.empty()) {
            stats.mean[name] = kNaN;
            stats.stddev[name] = kNaN;
            return;
        }
        // Two-pass mean/stddev over a fixed storage order: the reduction is
        // independent of how trials were scheduled.
        double m = 0.0;
        for (double x : xs) m += x;
        m /= static_cast<double>(xs.size());
        double acc = 0.0;
        for (double x : xs) acc += (x - m) * (x - m);
        stats.mean[name] = m;
        stats.stddev[name] =
            xs.size() > 1 ? std::sqrt(acc / static_cast<double>(xs.size() - 1)) : 0.0;
    };

    if (metrics.valid_time)
        reduce("valid_time", [](const TrialRecord& r) { return r.valid_time; });
    if (metrics.lambda_qr)
        reduce("lambda_qr", [](const TrialRecord& r) { return r.lambda_qr; });
    if (metrics.lambda_mf)
        reduce("lambda_mf", [](const TrialRecord& r) { return r.lambda_mf; });
    if (metrics.rank) reduce("rank", [](const TrialRecord& r) { return r.rank; });
    if (metrics.mc) reduce("mc", [](const TrialRecord& r) { return r.mc; });
    return stats;
}

PhaseDiagram run_sweep(const SweepSpec& spec)
{
    validate(spec);
    const std::size_t ni = spec.gA2_axis.size();
    const std::size_t nj = spec.nsin2_axis.size();
    const std::size_t per_cell = static_cast<std::size_t>(spec.trials);
    const std::size_t total = ni * nj * per_cell;

    std::vector<TrialRecord> records(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t w = next.fetch_add(1);
            if (w >= total) return;
            const std::size_t cell = w / per_cell;
            const int trial = static_cast<int>(w % per_cell);
            const std::size_t i = cell / nj;
            const std::size_t j = cell % nj;
            records[w] = run_cell(spec, i, j, trial);
        }
    };

    unsigned workers = spec.workers > 0 ? static_cast<unsigned>(spec.workers)
                                        : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    PhaseDiagram diagram;
    diagram.spec = spec;
    diagram.cells.assign(ni, std::vector<CellStats>(nj));
    for (std::size_t i = 0; i < ni; ++i)
        for (std::size_t j = 0; j < nj; ++j) {
            const std::size_t base = (i * nj + j) * per_cell;
            std::vector<TrialRecord> cell_records(records.begin() + base,
                                                  records.begin() + base + per_cell);
            diagram.cells[i][j] = reduce_trials(cell_records, spec.metrics);
        }
    return diagram;
}

namespace {

enum Edge { kBottom, kRight, kTop, kLeft };

ContourVertex edge_point(Edge e, double x0, double x1, double y0, double y1, double va,
                         double vb, double vc, double vd, double level)
{
    auto lerp = [level](double p, double q, double vp, double vq) {
        const double denom = vq - vp;
        const double t = denom == 0.0 ? 0.5 : (level - vp) / denom;
        return p + t * (q - p);
    };
    switch (e) {
        case kBottom: return {lerp(x0, x1, va, vb), y0};
        case kRight: return {x1, lerp(y0, y1, vb, vc)};
        case kTop: return {lerp(x0, x1, vd, vc), y1};
        case kLeft: return {x0, lerp(y0, y1, va, vd)};
    }
    return {0.0, 0.0};
}

void chain_segments(std::vector<std::pair<ContourVertex, ContourVertex>>& segments,
                    std::vector<Polyline>& out, double eps)
{
    auto close = [eps](const ContourVertex& p, const ContourVertex& q) {
        return std::abs(p[0] - q[0]) <= eps && std::abs(p[1] - q[1]) <= eps;
    };
    while (!segments.empty()) {
        Polyline line{segments.back().first, segments.back().second};
        segments.pop_back();
        bool grew = true;
        while (grew) {
            grew = false;
            for (std::size_t k = 0; k < segments.size(); ++k) {
                const auto& [p, q] = segments[k];
                if (close(line.back(), p)) {
                    line.push_back(q);
                } else if (close(line.back(), q)) {
                    line.push_back(p);
                } else if (close(line.front(), p)) {
                    line.insert(line.begin(), q);
                } else if (close(line.front(), q)) {
                    line.insert(line.begin(), p);
                } else {
                    continue;
                }
                segments.erase(segments.begin() + k);
                grew = true;
                break;
            }
        }
        out.push_back(std::move(line));
    }
}

}  // namespace

std::vector<Polyline> marching_squares(const std::vector<double>& x_axis,
                                       const std::vector<double>& y_axis,
                                       const std::vector<std::vector<double>>& values,
                                       double level)
{
    if (values.size() != x_axis.size())
        throw config_error("marching_squares: values/x_axis size mismatch");
    for (const auto& col : values)
        if (col.size() != y_axis.size())
            throw config_error("marching_squares: values/y_axis size mismatch");

    std::vector<std::pair<ContourVertex, ContourVertex>> segments;
    double span = 0.0;
    if (x_axis.size() > 1) span = std::max(span, x_axis.back() - x_axis.front());
    if (y_axis.size() > 1) span = std::max(span, y_axis.back() - y_axis.front());

    for (std::size_t i = 0; i + 1 < x_axis.size(); ++i) {
        for (std::size_t j = 0; j + 1 < y_axis.size(); ++j) {
            const double va = values[i][j], vb = values[i + 1][j];
            const double vc = values[i + 1][j + 1], vd = values[i][j + 1];
            if (!std::isfinite(va) || !std::isfinite(vb) || !std::isfinite(vc) ||
                !std::isfinite(vd))
                continue;
            const int code = (va >= level ? 1 : 0) | (vb >= level ? 2 : 0) |
                             (vc >= level ? 4 : 0) | (vd >= level ? 8 : 0);
            if (code == 0 || code == 15) continue;

            const double x0 = x_axis[i], x1 = x_axis[i + 1];
            const double y0 = y_axis[j], y1 = y_axis[j + 1];
            auto pt = [&](Edge e) {
                return edge_point(e, x0, x1, y0, y1, va, vb, vc, vd, level);
            };
            auto emit = [&](Edge e1, Edge e2) { segments.push_back({pt(e1), pt(e2)}); };

            switch (code) {
                case 1: emit(kLeft, kBottom); break;
                case 2: emit(kBottom, kRight); break;
                case 3: emit(kLeft, kRight); break;
                case 4: emit(kRight, kTop); break;
                case 6: emit(kBottom, kTop); break;
                case 7: emit(kLeft, kTop); break;
                case 8: emit(kTop, kLeft); break;
                case 9: emit(kBottom, kTop); break;
                case 11: emit(kRight, kTop); break;
                case 12: emit(kLeft, kRight); break;
                case 13: emit(kBottom, kRight); break;
                case 14: emit(kLeft, kBottom); break;
                case 5: {
                    const double center = 0.25 * (va + vb + vc + vd);
                    if (center >= level) {
                        emit(kBottom, kRight);
                        emit(kLeft, kTop);
                    } else {
                        emit(kLeft, kBottom);
                        emit(kRight, kTop);
                    }
                    break;
                }
                case 10: {
                    const double center = 0.25 * (va + vb + vc + vd);
                    if (center >= level) {
                        emit(kLeft, kBottom);
                        emit(kRight, kTop);
                    } else {
                        emit(kBottom, kRight);
                        emit(kLeft, kTop);
                    }
                    break;
                }
                default: break;
            }
        }
    }

    std::vector<Polyline> polylines;
    chain_segments(segments, polylines, span * 1e-9);
    return polylines;
}

std::vector<Polyline> extract_contour(const PhaseDiagram& diagram,
                                      const std::string& metric, double level)
{
    const std::size_t ni = diagram.spec.gA2_axis.size();
    const std::size_t nj = diagram.spec.nsin2_axis.size();
    std::vector<double> lx(ni), ly(nj);
    for (std::size_t i = 0; i < ni; ++i) lx[i] = std::log(diagram.spec.gA2_axis[i]);
    for (std::size_t j = 0; j < nj; ++j) ly[j] = std::log(diagram.spec.nsin2_axis[j]);

    std::vector<std::vector<double>> values(ni, std::vector<double>(nj, kNaN));
    for (std::size_t i = 0; i < ni; ++i)
        for (std::size_t j = 0; j < nj; ++j) {
            const auto& mean = diagram.cells[i][j].mean;
            const auto it = mean.find(metric);
            if (it == mean.end())
                throw config_error("extract_contour: metric not present: " + metric);
            values[i][j] = it->second;
        }

    std::vector<Polyline> logspace = marching_squares(lx, ly, values, level);
    for (Polyline& line : logspace)
        for (ContourVertex& v : line) {
            v[0] = std::exp(v[0]);
            v[1] = std::exp(v[1]);
        }
    return logspace;
}

}  // namespace reslab
