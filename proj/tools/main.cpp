// reslab command-line interface: data generation, single runs, sweeps,
// theory curves and plot emission.

#include "reslab/analysis.hpp"
#include "reslab/dynamics.hpp"
#include "reslab/errors.hpp"
#include "reslab/esn.hpp"
#include "reslab/io.hpp"
#include "reslab/lyapunov.hpp"
#include "reslab/meanfield.hpp"
#include "reslab/svg.hpp"
#include "reslab/sweep.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using nlohmann::json;
using namespace reslab;

namespace {

constexpr const char* kVersion = "reslab 0.1.0";

/// Resolved configuration for all subcommands, with the standard benchmark
/// settings as defaults (dt = 0.1, threshold = 0.5, k = 1e-2, N = 500).
struct RunConfig {
    // dynamics
    std::string system = "lorenz63";
    double dt = 0.1;
    double t_total = 500.0;
    double h = 0.01;
    std::string components = "all";
    std::uint64_t seed = 1;
    // esn
    int N = 500;
    double s = 1.0;
    double gA2 = 1.0;
    double nsin2 = 0.1;
    double ridge_k = 1e-2;
    int warmup = 1000;
    int train_steps = 0;  // 0: 200 Lyapunov times
    // evaluation
    double threshold = 0.5;
    double horizon_lt = 15.0;
    // sweep
    double gA2_min = 1e-6, gA2_max = 1e2;
    int gA2_count = 12;
    double nsin2_min = 1e-5, nsin2_max = 1e2;
    int nsin2_count = 12;
    int trials = 10;
    std::string task = "full";  // "full" or "partial"
    int partial_component = 1;
    std::vector<std::string> metrics{"valid_time", "lambda_mf"};
    int workers = 0;
    // lyapunov
    std::string kind = "driven";  // noinput | driven | closed | ode
    long qr_steps = 20000;
    double qr_tol = 0.01;
    // meanfield / contour
    int contour_points = 12;
    // mc
    long mc_T = 5000;
    int mc_tau_max = 0;  // 0: 2N
    double mc_ridge = 1e-8;
    // bifurcation
    double bif_gA2 = 1e-2;
    std::vector<double> ridge_ladder{1e-2};
    double ladder_min = 1e-8, ladder_max = 1e2;
    int ladder_count = 21;
    long bif_transient = 2000;
    long bif_horizon = 2000;
    double fixed_point_threshold = 1e-3;

    json to_json() const
    {
        return json{
            {"dynamics",
             {{"system", system},
              {"dt", dt},
              {"t_total", t_total},
              {"h", h},
              {"components", components},
              {"seed", seed}}},
            {"esn",
             {{"N", N},
              {"s", s},
              {"gA2", gA2},
              {"nsin2", nsin2},
              {"ridge_k", ridge_k},
              {"warmup", warmup},
              {"train_steps", train_steps}}},
            {"evaluation", {{"threshold", threshold}, {"horizon_lt", horizon_lt}}},
            {"sweep",
             {{"gA2_min", gA2_min},
              {"gA2_max", gA2_max},
              {"gA2_count", gA2_count},
              {"nsin2_min", nsin2_min},
              {"nsin2_max", nsin2_max},
              {"nsin2_count", nsin2_count},
              {"trials", trials},
              {"task", task},
              {"partial_component", partial_component},
              {"metrics", metrics},
              {"workers", workers}}},
            {"lyapunov", {{"kind", kind}, {"qr_steps", qr_steps}, {"qr_tol", qr_tol}}},
            {"meanfield", {{"contour_points", contour_points}}},
            {"mc", {{"T", mc_T}, {"tau_max", mc_tau_max}, {"ridge", mc_ridge}}},
            {"bifurcation",
             {{"gA2", bif_gA2},
              {"ridge_ladder", ridge_ladder},
              {"ladder_min", ladder_min},
              {"ladder_max", ladder_max},
              {"ladder_count", ladder_count},
              {"transient", bif_transient},
              {"horizon", bif_horizon},
              {"fixed_point_threshold", fixed_point_threshold}}}};
    }

    void load_file(const std::string& path);
};

void reject_unknown(const json& obj, const json& schema, const std::string& where)
{
    for (const auto& [key, value] : obj.items()) {
        if (!schema.contains(key))
            throw config_error("config: unknown key '" + where + key + "'");
        if (value.is_object()) reject_unknown(value, schema.at(key), where + key + ".");
    }
}

template <typename T>
void maybe(const json& obj, const char* section, const char* key, T& into)
{
    if (obj.contains(section) && obj.at(section).contains(key))
        obj.at(section).at(key).get_to(into);
}

void RunConfig::load_file(const std::string& path)
{
    const json obj = json::parse(read_file(path));
    reject_unknown(obj, to_json(), "");
    maybe(obj, "dynamics", "system", system);
    maybe(obj, "dynamics", "dt", dt);
    maybe(obj, "dynamics", "t_total", t_total);
    maybe(obj, "dynamics", "h", h);
    maybe(obj, "dynamics", "components", components);
    maybe(obj, "dynamics", "seed", seed);
    maybe(obj, "esn", "N", N);
    maybe(obj, "esn", "s", s);
    maybe(obj, "esn", "gA2", gA2);
    maybe(obj, "esn", "nsin2", nsin2);
    maybe(obj, "esn", "ridge_k", ridge_k);
    maybe(obj, "esn", "warmup", warmup);
    maybe(obj, "esn", "train_steps", train_steps);
    maybe(obj, "evaluation", "threshold", threshold);
    maybe(obj, "evaluation", "horizon_lt", horizon_lt);
    maybe(obj, "sweep", "gA2_min", gA2_min);
    maybe(obj, "sweep", "gA2_max", gA2_max);
    maybe(obj, "sweep", "gA2_count", gA2_count);
    maybe(obj, "sweep", "nsin2_min", nsin2_min);
    maybe(obj, "sweep", "nsin2_max", nsin2_max);
    maybe(obj, "sweep", "nsin2_count", nsin2_count);
    maybe(obj, "sweep", "trials", trials);
    maybe(obj, "sweep", "task", task);
    maybe(obj, "sweep", "partial_component", partial_component);
    maybe(obj, "sweep", "metrics", metrics);
    maybe(obj, "sweep", "workers", workers);
    maybe(obj, "lyapunov", "kind", kind);
    maybe(obj, "lyapunov", "qr_steps", qr_steps);
    maybe(obj, "lyapunov", "qr_tol", qr_tol);
    maybe(obj, "meanfield", "contour_points", contour_points);
    maybe(obj, "mc", "T", mc_T);
    maybe(obj, "mc", "tau_max", mc_tau_max);
    maybe(obj, "mc", "ridge", mc_ridge);
    maybe(obj, "bifurcation", "gA2", bif_gA2);
    maybe(obj, "bifurcation", "ridge_ladder", ridge_ladder);
    maybe(obj, "bifurcation", "ladder_min", ladder_min);
    maybe(obj, "bifurcation", "ladder_max", ladder_max);
    maybe(obj, "bifurcation", "ladder_count", ladder_count);
    maybe(obj, "bifurcation", "transient", bif_transient);
    maybe(obj, "bifurcation", "horizon", bif_horizon);
    maybe(obj, "bifurcation", "fixed_point_threshold", fixed_point_threshold);
}

OdeSystem system_of(const RunConfig& cfg)
{
    if (cfg.system == "lorenz63") return OdeSystem::lorenz63();
    if (cfg.system == "halvorsen") return OdeSystem::halvorsen();
    throw config_error("unknown system: " + cfg.system);
}

std::vector<int> parse_components(const std::string& text)
{
    if (text == "all") return {0, 1, 2};
    if (text == "x") return {0};
    if (text == "y") return {1};
    if (text == "z") return {2};
    std::vector<int> out;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (out.empty()) throw config_error("cannot parse components: " + text);
    return out;
}

std::string config_comment(const RunConfig& cfg)
{
    return "# config " + cfg.to_json().dump() + "\n";
}

void emit(const std::string& out_path, const std::string& content)
{
    if (out_path.empty() || out_path == "-")
        std::cout << content;
    else
        write_file(out_path, content);
}

/// Input series, reservoir config and evaluation pieces shared by run,
/// lyapunov and sweep-like commands.
struct SingleSetup {
    TimeSeries input;
    EsnConfig esn;
    OdeSystem system;
    double lambda1 = 0.0;
    long horizon = 0;
    int t_max = 0;
};

SingleSetup prepare_single(const RunConfig& cfg)
{
    SingleSetup setup;
    setup.system = system_of(cfg);
    setup.lambda1 = attractor_lambda1(setup.system);
    const std::vector<int> comps =
        cfg.task == "partial" ? std::vector<int>{cfg.partial_component}
                              : std::vector<int>{0, 1, 2};
    setup.t_max = cfg.train_steps > 0
                      ? cfg.train_steps
                      : static_cast<int>(std::lround(200.0 / (setup.lambda1 * cfg.dt)));
    setup.horizon = std::lround(cfg.horizon_lt / (setup.lambda1 * cfg.dt));
    const Eigen::Index need = cfg.warmup + setup.t_max + 1 + setup.horizon + 1;
    const TimeSeries full = generate_series(setup.system, cfg.dt, need, cfg.seed, cfg.h);
    setup.input = comps.size() == 3 ? full : select_components(full, comps);

    setup.esn.N = cfg.N;
    setup.esn.n = static_cast<int>(setup.input.components());
    setup.esn.s = cfg.s;
    setup.esn.sigma_A2 = cfg.gA2 / (cfg.s * cfg.N);
    setup.esn.sigma_in2 = cfg.nsin2 / setup.esn.n;
    setup.esn.ridge_k = cfg.ridge_k;
    setup.esn.warmup_steps = cfg.warmup;
    setup.esn.train_steps = setup.t_max;
    setup.esn.seed = cfg.seed;
    return setup;
}

int cmd_generate(const RunConfig& cfg, const std::string& out_path)
{
    const OdeSystem system = system_of(cfg);
    const Eigen::Index samples = static_cast<Eigen::Index>(cfg.t_total / cfg.dt);
    TimeSeries series = generate_series(system, cfg.dt, samples, cfg.seed, cfg.h);
    const std::vector<int> comps = parse_components(cfg.components);
    if (comps != std::vector<int>{0, 1, 2}) series = select_components(series, comps);
    emit(out_path, config_comment(cfg) + series_to_csv(series));
    return 0;
}

int cmd_run(const RunConfig& cfg, const std::string& out_path,
            const std::string& save_reservoir, const std::string& save_readout)
{
    const SingleSetup setup = prepare_single(cfg);
    const Reservoir res = build_reservoir(setup.esn);
    const Harvest h = harvest(res, setup.input, cfg.warmup, setup.t_max);
    const LuFeatureMap map = LuFeatureMap::second_half(cfg.N);
    const TrainedReadout ro = train_readout(h, cfg.ridge_k, map);
    if (!save_reservoir.empty()) write_file(save_reservoir, reservoir_to_json(res));
    if (!save_readout.empty()) write_file(save_readout, readout_to_json(ro));
    const Prediction pred = predict_closed_loop(res, ro, h.r_final, setup.horizon, cfg.dt);

    TimeSeries target = setup.input;
    target.samples =
        setup.input.samples.middleCols(cfg.warmup + setup.t_max, setup.horizon);
    const ValidTime vt = score_prediction(pred, target, cfg.threshold, setup.lambda1);

    const LyapunovEstimate qr = training_lyapunov_qr(
        res, setup.input, ExponentKind::Driven, cfg.qr_steps, 500, cfg.qr_tol);
    const double mf = meanfield_lyapunov(
        MeanFieldInput::from_series(cfg.gA2, setup.esn.sigma_in2, setup.input));

    json closed;
    try {
        const LyapunovEstimate cl =
            closed_loop_lyapunov(res, ro, h.r_final, cfg.qr_steps, cfg.qr_tol);
        closed = {{"lambda_per_step", cl.lambda},
                  {"lambda_per_time", cl.lambda / cfg.dt},
                  {"converged", cl.converged}};
    } catch (const divergence_error& e) {
        closed = {{"diverged_at", e.step}};
    }

    const json report{{"config", cfg.to_json()},
                      {"valid_time_lt", vt.lyapunov_times},
                      {"censored", vt.censored},
                      {"diverged", vt.diverged},
                      {"lambda_qr", qr.lambda},
                      {"lambda_qr_converged", qr.converged},
                      {"lambda_mf", mf},
                      {"closed_loop", closed},
                      {"rank", numerical_rank(h.R)}};
    emit(out_path, report.dump(2) + "\n");
    return 0;
}

MetricSet parse_metrics(const std::vector<std::string>& names)
{
    MetricSet set;
    set.valid_time = false;
    for (const std::string& name : names) {
        if (name == "valid_time") set.valid_time = true;
        else if (name == "lambda_qr") set.lambda_qr = true;
        else if (name == "lambda_mf") set.lambda_mf = true;
        else if (name == "rank") set.rank = true;
        else if (name == "mc") set.mc = true;
        else throw config_error("unknown metric: " + name);
    }
    return set;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_path)
{
    SweepSpec spec;
    spec.gA2_axis = log_spaced(cfg.gA2_min, cfg.gA2_max, cfg.gA2_count);
    spec.nsin2_axis = log_spaced(cfg.nsin2_min, cfg.nsin2_max, cfg.nsin2_count);
    spec.trials = cfg.trials;
    spec.esn_template.N = cfg.N;
    spec.esn_template.s = cfg.s;
    spec.esn_template.ridge_k = cfg.ridge_k;
    spec.esn_template.warmup_steps = cfg.warmup;
    spec.esn_template.train_steps = cfg.train_steps;
    spec.task = cfg.task == "partial" ? TaskKind::PartialInfo : TaskKind::FullInfo;
    spec.partial_component = cfg.partial_component;
    spec.system = system_of(cfg);
    spec.dt = cfg.dt;
    spec.base_seed = cfg.seed;
    spec.metrics = parse_metrics(cfg.metrics);
    spec.threshold = cfg.threshold;
    spec.horizon_lyapunov_times = cfg.horizon_lt;
    spec.workers = cfg.workers;

    const auto t0 = std::chrono::steady_clock::now();
    const PhaseDiagram diagram = run_sweep(spec);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string base = out_path.empty() ? "sweep" : out_path;
    write_file(base + ".csv", config_comment(cfg) + diagram_to_csv(diagram));

    const json manifest{{"config", cfg.to_json()},
                        {"version", kVersion},
                        {"wall_clock_seconds", seconds},
                        {"csv", base + ".csv"},
                        {"config_hash", fnv1a_hex(cfg.to_json().dump())}};
    write_file(base + ".manifest.json", manifest.dump(2) + "\n");
    std::cout << "wrote " << base << ".csv and " << base << ".manifest.json\n";
    return 0;
}

int cmd_contour(const RunConfig& cfg, const std::string& out_path)
{
    const OdeSystem system = system_of(cfg);
    const std::vector<int> comps =
        cfg.task == "partial" ? std::vector<int>{cfg.partial_component}
                              : std::vector<int>{0, 1, 2};
    TimeSeries series = generate_series(system, cfg.dt, 2000, cfg.seed, cfg.h);
    if (comps.size() != 3) series = select_components(series, comps);

    std::vector<Eigen::VectorXd> samples;
    for (Eigen::Index t = 0; t < series.length(); ++t)
        samples.push_back(series.samples.col(t));

    const auto grid = log_spaced(cfg.nsin2_min, cfg.nsin2_max, cfg.contour_points);
    const auto points = zero_contour(samples, static_cast<int>(series.components()),
                                     cfg.gA2_min, cfg.gA2_max, grid);
    if (points.size() < grid.size())
        std::cerr << "warning: " << grid.size() - points.size()
                  << " grid values had no crossing in range\n";
    emit(out_path, config_comment(cfg) + meanfield_contour_to_csv(points));
    return 0;
}

int cmd_lyapunov(const RunConfig& cfg, const std::string& out_path,
                 const std::string& dump_running)
{
    if (cfg.kind == "ode") {
        const OdeSystem system = system_of(cfg);
        const Vec3 x0 =
            integrate(system, {1.0, 1.0, 1.0}, cfg.h, kAttractorBurnIn).states.back();
        const Eigen::Vector3d exps = lyapunov_spectrum(system, x0, cfg.h, cfg.t_total);
        const json report{{"config", cfg.to_json()},
                          {"lambda", {exps(0), exps(1), exps(2)}},
                          {"units", "1/time"}};
        emit(out_path, report.dump(2) + "\n");
        return 0;
    }

    const SingleSetup setup = prepare_single(cfg);
    const Reservoir res = build_reservoir(setup.esn);
    LyapunovEstimate est;
    if (cfg.kind == "closed") {
        const Harvest h = harvest(res, setup.input, cfg.warmup, setup.t_max);
        const TrainedReadout ro =
            train_readout(h, cfg.ridge_k, LuFeatureMap::second_half(cfg.N));
        est = closed_loop_lyapunov(res, ro, h.r_final, cfg.qr_steps, cfg.qr_tol);
    } else if (cfg.kind == "driven" || cfg.kind == "noinput") {
        const ExponentKind kind =
            cfg.kind == "driven" ? ExponentKind::Driven : ExponentKind::NoInput;
        est = training_lyapunov_qr(res, setup.input, kind, cfg.qr_steps, 500, cfg.qr_tol);
    } else {
        throw config_error("unknown lyapunov kind: " + cfg.kind);
    }

    if (!dump_running.empty()) {
        std::string csv = config_comment(cfg) + "check,lambda_running\n";
        for (std::size_t i = 0; i < est.running_sequence.size(); ++i)
            csv += std::to_string(i) + "," + std::to_string(est.running_sequence[i]) + "\n";
        write_file(dump_running, csv);
    }

    const json report{{"config", cfg.to_json()},
                      {"kind", cfg.kind},
                      {"lambda_per_step", est.lambda},
                      {"lambda_per_time", est.lambda / cfg.dt},
                      {"steps_used", est.steps_used},
                      {"converged", est.converged}};
    emit(out_path, report.dump(2) + "\n");
    return 0;
}

int cmd_meanfield(const RunConfig& cfg, const std::string& out_path)
{
    const OdeSystem system = system_of(cfg);
    const std::vector<int> comps =
        cfg.task == "partial" ? std::vector<int>{cfg.partial_component}
                              : std::vector<int>{0, 1, 2};
    TimeSeries series = generate_series(system, cfg.dt, 2000, cfg.seed, cfg.h);
    if (comps.size() != 3) series = select_components(series, comps);

    const double sigma_in2 = cfg.nsin2 / static_cast<double>(series.components());
    const MeanFieldInput mfi = MeanFieldInput::from_series(cfg.gA2, sigma_in2, series);
    const FixedPointResult fp = iterate_variance_map(mfi);
    const double lambda = meanfield_lyapunov(mfi);

    const json report{{"config", cfg.to_json()},
                      {"lambda_per_step", lambda},
                      {"sigma_r_star2", fp.sigma_r_star2},
                      {"d2_mean", fp.d2_mean},
                      {"r4_mean", fp.r4_mean},
                      {"iterations", fp.iterations},
                      {"converged", fp.converged}};
    emit(out_path, report.dump(2) + "\n");
    return 0;
}

int cmd_mc(const RunConfig& cfg, const std::string& out_path)
{
    EsnConfig esn;
    esn.N = cfg.N;
    esn.n = 1;
    esn.s = cfg.s;
    esn.sigma_A2 = cfg.gA2 / (cfg.s * cfg.N);
    esn.sigma_in2 = cfg.nsin2;  // scalar input: n sigma_in^2 = sigma_in^2
    esn.seed = cfg.seed;
    const Reservoir res = build_reservoir(esn);
    const int tau_max = cfg.mc_tau_max > 0 ? cfg.mc_tau_max : 2 * cfg.N;
    const MemoryCapacityResult mc =
        memory_capacity(res, cfg.mc_T, tau_max, cfg.mc_ridge, cfg.seed);

    std::string csv = config_comment(cfg);
    csv += "# mc_total " + std::to_string(mc.mc_total) + "\n";
    csv += "tau,mc\n";
    for (int tau = 1; tau <= mc.tau_max_used; ++tau)
        csv += std::to_string(tau) + "," + std::to_string(mc.mc_per_delay[tau - 1]) + "\n";
    emit(out_path, csv);
    return 0;
}

int cmd_bifurcation(const RunConfig& cfg, const std::string& out_path)
{
    const std::vector<double> ladder =
        log_spaced(cfg.ladder_min, cfg.ladder_max, cfg.ladder_count);

    std::string csv = config_comment(cfg) + "ridge_k,n_sin2,v0,is_fixed_point,diverged\n";
    for (double k : cfg.ridge_ladder) {
        BifurcationSettings settings;
        settings.esn_template.N = cfg.N;
        settings.esn_template.n = 3;
        settings.esn_template.s = cfg.s;
        settings.esn_template.warmup_steps = cfg.warmup;
        settings.esn_template.train_steps = cfg.train_steps;
        settings.esn_template.seed = cfg.seed;
        settings.gA2 = cfg.bif_gA2;
        settings.ridge_k = k;
        settings.transient = cfg.bif_transient;
        settings.horizon = cfg.bif_horizon;
        settings.fixed_point_threshold = cfg.fixed_point_threshold;
        const BifurcationScan scan = bifurcation_scan(settings, ladder);

        const std::string body = bifurcation_to_csv(scan);
        // Re-emit with the ridge column in front.
        std::istringstream is(body);
        std::string line;
        std::getline(is, line);  // header
        char kbuf[32];
        std::snprintf(kbuf, sizeof(kbuf), "%.17g", k);
        while (std::getline(is, line))
            if (!line.empty()) csv += std::string(kbuf) + "," + line + "\n";
    }
    emit(out_path, csv);
    return 0;
}

struct PlotArgs {
    std::string diagram_csv;
    std::string metric = "valid_time_mean";
    std::string red_contour, green_contour, blue_contour;
    double dashed_gA2 = 0.0;
    std::string bifurcation_csv;
    std::string out = "plot.svg";
    std::string title;
};

/// Mean-field contour CSVs carry one (n_sin2, gA2) vertex per row; generic
/// contour CSVs carry (polyline, gA2, n_sin2) rows. Accept either.
std::vector<Polyline> load_overlay(const std::string& body)
{
    std::istringstream is(body);
    std::string line;
    while (std::getline(is, line) && (line.empty() || line[0] == '#')) {}
    if (line.rfind("polyline", 0) == 0) return contour_from_csv(body);

    Polyline pl;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        const double nsin2 = std::stod(line.substr(0, comma));
        const double gA2 = std::stod(line.substr(comma + 1));
        pl.push_back({gA2, nsin2});
    }
    return {pl};
}

int cmd_plot(const PlotArgs& args)
{
    if (!args.bifurcation_csv.empty()) {
        const std::string text = read_file(args.bifurcation_csv);
        BifurcationScan scan;
        std::istringstream is(text);
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("ridge_k", 0) == 0 ||
                line.rfind("n_sin2", 0) == 0)
                continue;
            std::istringstream ls(line);
            std::string cell;
            std::vector<std::string> cells;
            while (std::getline(ls, cell, ',')) cells.push_back(cell);
            if (cells.size() < 4) continue;
            const std::size_t base = cells.size() - 4;  // optional ridge_k in front
            const double p = std::stod(cells[base + 0]);
            if (scan.parameter_values.empty() || scan.parameter_values.back() != p) {
                scan.parameter_values.push_back(p);
                scan.attractor_samples.emplace_back();
                scan.is_fixed_point.push_back(false);
                scan.diverged.push_back(false);
            }
            if (cells[base + 1] != "nan")
                scan.attractor_samples.back().push_back(std::stod(cells[base + 1]));
        }
        const std::string svg = render_bifurcation(
            scan, args.title.empty() ? "bifurcation" : args.title, fnv1a_hex(text));
        write_file(args.out, svg);
        std::cout << "wrote " << args.out << "\n";
        return 0;
    }

    const std::string text = read_file(args.diagram_csv);
    const DiagramTable table = diagram_from_csv(text);
    std::size_t col = 0;
    bool found = false;
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        if (table.columns[c] == args.metric) {
            col = c;
            found = true;
        }
    if (!found) throw config_error("plot: metric column not found: " + args.metric);

    std::vector<OverlayLine> overlays;
    auto add_contour = [&overlays](const std::string& path, const std::string& color) {
        if (path.empty()) return;
        OverlayLine line;
        line.polylines = load_overlay(read_file(path));
        line.color = color;
        overlays.push_back(line);
    };
    add_contour(args.red_contour, "#d62728");
    add_contour(args.green_contour, "#2ca02c");
    add_contour(args.blue_contour, "#1f77b4");
    if (args.dashed_gA2 > 0.0) {
        OverlayLine dashed;
        dashed.polylines = {{{args.dashed_gA2, table.nsin2_axis.front()},
                             {args.dashed_gA2, table.nsin2_axis.back()}}};
        dashed.color = "#000000";
        dashed.dashed = true;
        overlays.push_back(dashed);
    }

    HeatmapOptions options;
    options.title = args.title.empty() ? args.metric : args.title;
    options.metric = args.metric;
    options.config_hash = fnv1a_hex(text);
    const std::string svg = render_heatmap(table.gA2_axis, table.nsin2_axis,
                                           table.values[col], overlays, options);
    write_file(args.out, svg);
    std::cout << "wrote " << args.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"reservoir-computing laboratory"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    RunConfig cfg;
    if (const char* env = std::getenv("RESLAB_WORKERS")) cfg.workers = std::atoi(env);

    std::string config_path, out_path, dump_running, save_reservoir, save_readout;
    // Load the config file before CLI11 binds flag values, so flags override it.
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    try {
        if (!config_path.empty()) cfg.load_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    app.add_option("--config", config_path, "JSON config file (flags override it)");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (flags override it)");
        sub->add_option("--system", cfg.system, "lorenz63 | halvorsen");
        sub->add_option("--dt", cfg.dt, "sampling interval");
        sub->add_option("--seed", cfg.seed, "base seed");
        sub->add_option("--out", out_path, "output path ('-' for stdout)");
    };
    auto add_esn = [&](CLI::App* sub) {
        sub->add_option("--N", cfg.N, "reservoir dimension");
        sub->add_option("--gA2", cfg.gA2, "s N sigma_A^2");
        sub->add_option("--nsin2", cfg.nsin2, "n sigma_in^2");
        sub->add_option("--ridge-k", cfg.ridge_k, "ridge parameter");
        sub->add_option("--warmup", cfg.warmup, "synchronization steps");
        sub->add_option("--train-steps", cfg.train_steps, "T_max (0: 200 Lyapunov times)");
        sub->add_option("--task", cfg.task, "full | partial");
        sub->add_option("--component", cfg.partial_component,
                        "component index for the partial task");
    };

    CLI::App* generate = app.add_subcommand("generate", "sampled, normalized series");
    add_common(generate);
    generate->add_option("--t", cfg.t_total, "series duration (time units)")->required();
    generate->add_option("--components", cfg.components, "all | x | y | z | list");

    CLI::App* run = app.add_subcommand("run", "one train+predict trial, JSON report");
    add_common(run);
    add_esn(run);
    run->add_option("--threshold", cfg.threshold, "deviation threshold");
    run->add_option("--save-reservoir", save_reservoir, "write the reservoir as JSON");
    run->add_option("--save-readout", save_readout, "write the trained readout as JSON");
    run->add_option("--horizon-lt", cfg.horizon_lt, "evaluation horizon");
    run->add_option("--qr-steps", cfg.qr_steps);

    CLI::App* sweep = app.add_subcommand("sweep", "phase diagram over the plane");
    add_common(sweep);
    add_esn(sweep);
    sweep->add_option("--trials", cfg.trials, "trials per cell");
    sweep->add_option("--gA2-min", cfg.gA2_min);
    sweep->add_option("--gA2-max", cfg.gA2_max);
    sweep->add_option("--gA2-count", cfg.gA2_count);
    sweep->add_option("--nsin2-min", cfg.nsin2_min);
    sweep->add_option("--nsin2-max", cfg.nsin2_max);
    sweep->add_option("--nsin2-count", cfg.nsin2_count);
    sweep->add_option("--metrics", cfg.metrics,
                      "valid_time lambda_qr lambda_mf rank mc");
    sweep->add_option("--workers", cfg.workers, "0: hardware concurrency");

    CLI::App* contour = app.add_subcommand("contour", "mean-field lambda_T = 0 curve");
    add_common(contour);
    contour->add_option("--task", cfg.task, "full | partial");
    contour->add_option("--component", cfg.partial_component);
    contour->add_option("--gA2-min", cfg.gA2_min);
    contour->add_option("--gA2-max", cfg.gA2_max);
    contour->add_option("--nsin2-min", cfg.nsin2_min);
    contour->add_option("--nsin2-max", cfg.nsin2_max);
    contour->add_option("--points", cfg.contour_points);

    CLI::App* lyap = app.add_subcommand("lyapunov", "QR exponents / ODE spectrum");
    add_common(lyap);
    add_esn(lyap);
    lyap->add_option("--kind", cfg.kind, "noinput | driven | closed | ode");
    lyap->add_option("--steps", cfg.qr_steps);
    lyap->add_option("--tol", cfg.qr_tol);
    lyap->add_option("--t", cfg.t_total, "ODE averaging time");
    lyap->add_option("--dump-running", dump_running, "CSV of running estimates");

    CLI::App* meanfield = app.add_subcommand("meanfield", "fixed point and lambda_T");
    add_common(meanfield);
    meanfield->add_option("--gA2", cfg.gA2);
    meanfield->add_option("--nsin2", cfg.nsin2);
    meanfield->add_option("--task", cfg.task, "full | partial");
    meanfield->add_option("--component", cfg.partial_component);

    CLI::App* mc = app.add_subcommand("mc", "linear memory capacity");
    add_common(mc);
    mc->add_option("--N", cfg.N);
    mc->add_option("--gA2", cfg.gA2);
    mc->add_option("--nsin2", cfg.nsin2);
    mc->add_option("--T", cfg.mc_T);
    mc->add_option("--tau-max", cfg.mc_tau_max, "0: 2N");
    mc->add_option("--ridge", cfg.mc_ridge);

    CLI::App* bif = app.add_subcommand("bifurcation", "closed-loop scan over input scale");
    add_common(bif);
    bif->add_option("--N", cfg.N);
    bif->add_option("--gA2", cfg.bif_gA2, "fixed s N sigma_A^2");
    bif->add_option("--ridge-ladder", cfg.ridge_ladder, "ridge values, one scan each");
    bif->add_option("--ladder-min", cfg.ladder_min);
    bif->add_option("--ladder-max", cfg.ladder_max);
    bif->add_option("--ladder-count", cfg.ladder_count);
    bif->add_option("--transient", cfg.bif_transient);
    bif->add_option("--horizon", cfg.bif_horizon);
    bif->add_option("--warmup", cfg.warmup);
    bif->add_option("--train-steps", cfg.train_steps);

    PlotArgs plot_args;
    CLI::App* plot = app.add_subcommand("plot", "CSV to SVG");
    plot->add_option("--config", config_path, "JSON config file (unused by plot)");
    plot->add_option("--diagram", plot_args.diagram_csv, "phase-diagram CSV");
    plot->add_option("--metric", plot_args.metric, "column to color");
    plot->add_option("--red-contour", plot_args.red_contour, "mean-field zero curve");
    plot->add_option("--green-contour", plot_args.green_contour, "rank level set");
    plot->add_option("--blue-contour", plot_args.blue_contour, "bifurcation curve");
    plot->add_option("--dashed-gA2", plot_args.dashed_gA2,
                     "vertical dashed line (no-input zero crossing)");
    plot->add_option("--bifurcation", plot_args.bifurcation_csv, "bifurcation CSV");
    plot->add_option("--out", plot_args.out, "SVG path");
    plot->add_option("--title", plot_args.title);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(cfg, out_path);
        if (run->parsed()) return cmd_run(cfg, out_path, save_reservoir, save_readout);
        if (sweep->parsed()) return cmd_sweep(cfg, out_path);
        if (contour->parsed()) return cmd_contour(cfg, out_path);
        if (lyap->parsed()) return cmd_lyapunov(cfg, out_path, dump_running);
        if (meanfield->parsed()) return cmd_meanfield(cfg, out_path);
        if (mc->parsed()) return cmd_mc(cfg, out_path);
        if (bif->parsed()) return cmd_bifurcation(cfg, out_path);
        if (plot->parsed()) return cmd_plot(plot_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
