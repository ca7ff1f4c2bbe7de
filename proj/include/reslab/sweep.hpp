#pragma once

#include "reslab/analysis.hpp"
#include "reslab/dynamics.hpp"
#include "reslab/esn.hpp"

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace reslab {

enum class TaskKind { FullInfo, PartialInfo };

/// count log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int count);

/// Which per-trial quantities a sweep computes. Everything off by default
/// except the headline valid time.
struct MetricSet {
    bool valid_time = true;
    bool lambda_qr = false;
    bool lambda_mf = false;
    bool rank = false;
    bool mc = false;
};

/// A trial-averaged experiment over the (s N sigma_A^2, n sigma_in^2) plane.
/// The axes are the combined parameters; per-cell sigma_A^2 and sigma_in^2
/// are back-derived from the template's s, N and the task's input dimension.
struct SweepSpec {
    std::vector<double> gA2_axis;
    std::vector<double> nsin2_axis;
    int trials = 10;
    EsnConfig esn_template;  // sigma_A2 / sigma_in2 ignored; derived per cell
    TaskKind task = TaskKind::FullInfo;
    int partial_component = 1;  // used when task == PartialInfo
    OdeSystem system = OdeSystem::lorenz63();
    double dt = 0.1;
    std::uint64_t base_seed = 1;
    MetricSet metrics;
    double threshold = 0.5;
    double horizon_lyapunov_times = 15.0;
    long qr_steps = 2000;
    double rank_rel_tol = 1e-10;  // reported with every rank value
    int workers = 0;  // 0: hardware concurrency
};

/// One trial's measurements. NaN marks "not requested or not available".
struct TrialRecord {
    double valid_time = 0.0;
    bool censored = false;
    bool diverged = false;
    double lambda_qr = 0.0;
    double lambda_mf = 0.0;
    double rank = 0.0;
    double mc = 0.0;
    bool failed = false;      // the trial threw; recorded, never fatal
    std::string error;
};

struct CellStats {
    std::map<std::string, double> mean;
    std::map<std::string, double> stddev;  // sample stddev across trials
    double diverged_frac = 0.0;
    int trials_completed = 0;
};

struct PhaseDiagram {
    SweepSpec spec;
    std::vector<std::vector<CellStats>> cells;  // [i over gA2][j over nsin2]

    const CellStats& at(std::size_t i, std::size_t j) const { return cells[i][j]; }
};

/// Run one (cell, trial): derive the variances, build the reservoir with the
/// hash-derived seed, generate a fresh trajectory, train, predict, score.
TrialRecord run_cell(const SweepSpec& spec, std::size_t i, std::size_t j, int trial);

/// All cells and trials, reduced to per-cell means/stddevs. Parallel over
/// (cell, trial) work items; results are independent of the worker count.
PhaseDiagram run_sweep(const SweepSpec& spec);

/// Reduce explicit trial records (exposed so split runs can be merged and
/// compared against a single-process sweep).
CellStats reduce_trials(const std::vector<TrialRecord>& records, const MetricSet& metrics);

using ContourVertex = std::array<double, 2>;  // (gA2, nsin2)
using Polyline = std::vector<ContourVertex>;

/// Marching-squares level set of a cell-mean metric over the log-log grid,
/// returned in original (gA2, nsin2) coordinates.
std::vector<Polyline> extract_contour(const PhaseDiagram& diagram,
                                      const std::string& metric, double level);

/// Marching squares over an arbitrary grid: values[i][j] at
/// (x_axis[i], y_axis[j]), interpolated in the given coordinates.
std::vector<Polyline> marching_squares(const std::vector<double>& x_axis,
                                       const std::vector<double>& y_axis,
                                       const std::vector<std::vector<double>>& values,
                                       double level);

}  // namespace reslab
