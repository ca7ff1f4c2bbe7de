#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "reslab/errors.hpp"
#include "reslab/sweep.hpp"

#include <cmath>

using namespace reslab;

namespace {

SweepSpec small_spec()
{
    SweepSpec spec;
    spec.gA2_axis = {1e-3, 1e-1};
    spec.nsin2_axis = {1e-2, 1.0};
    spec.trials = 2;
    spec.esn_template.N = 60;
    spec.esn_template.warmup_steps = 150;
    spec.esn_template.train_steps = 300;
    spec.esn_template.ridge_k = 1e-4;
    spec.task = TaskKind::FullInfo;
    spec.base_seed = 11;
    spec.horizon_lyapunov_times = 5.0;
    spec.workers = 1;
    return spec;
}

bool records_equal(const TrialRecord& a, const TrialRecord& b)
{
    auto same = [](double x, double y) {
        return (std::isnan(x) && std::isnan(y)) || x == y;
    };
    return same(a.valid_time, b.valid_time) && a.censored == b.censored &&
           a.diverged == b.diverged && same(a.lambda_qr, b.lambda_qr) &&
           same(a.lambda_mf, b.lambda_mf) && same(a.rank, b.rank) &&
           same(a.mc, b.mc) && a.failed == b.failed;
}

}  // namespace

TEST_CASE("log_spaced: endpoints exact, strictly increasing")
{
    const auto axis = log_spaced(1e-6, 1e2, 12);
    REQUIRE(axis.size() == 12);
    CHECK(axis.front() == 1e-6);
    CHECK(axis.back() == 1e2);
    for (std::size_t k = 0; k + 1 < axis.size(); ++k) CHECK(axis[k] < axis[k + 1]);
}

TEST_CASE("run_cell: deterministic for identical coordinates")
{
    const SweepSpec spec = small_spec();
    const TrialRecord a = run_cell(spec, 0, 1, 1);
    const TrialRecord b = run_cell(spec, 0, 1, 1);
    CHECK(records_equal(a, b));
    CHECK_FALSE(a.failed);
}

TEST_CASE("run_cell: different trials differ")
{
    const SweepSpec spec = small_spec();
    const TrialRecord a = run_cell(spec, 0, 0, 0);
    const TrialRecord b = run_cell(spec, 0, 0, 1);
    CHECK(a.valid_time != b.valid_time);
}

TEST_CASE("run_cell: gA2 = 0 exercises the A = 0 path; partial info fails there")
{
    SweepSpec spec = small_spec();
    spec.gA2_axis = {0.0, 1.0};
    spec.task = TaskKind::PartialInfo;
    spec.partial_component = 1;
    spec.esn_template.N = 100;
    spec.esn_template.train_steps = 600;
    double total = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        const TrialRecord rec = run_cell(spec, 0, 1, trial);
        CHECK_FALSE(rec.failed);
        total += rec.valid_time;
    }
    CHECK(total / 3.0 < 1.0);  // memoryless reservoirs cannot embed
}

TEST_CASE("run_cell: deep in the unstable region full info barely predicts")
{
    SweepSpec spec = small_spec();
    spec.gA2_axis = {1e-3, 100.0};
    spec.nsin2_axis = {1e-4, 1e-3};
    spec.esn_template.N = 100;
    double total = 0.0;
    for (int trial = 0; trial < 3; ++trial)
        total += run_cell(spec, 1, 0, trial).valid_time;
    CHECK(total / 3.0 < 1.0);
}

TEST_CASE("run_sweep: single cell, single trial equals run_cell")
{
    SweepSpec spec = small_spec();
    spec.gA2_axis = {1e-1};
    spec.nsin2_axis = {0.5};
    spec.trials = 1;
    const PhaseDiagram diagram = run_sweep(spec);
    const TrialRecord rec = run_cell(spec, 0, 0, 0);
    CHECK(diagram.at(0, 0).mean.at("valid_time") == rec.valid_time);
    CHECK(diagram.at(0, 0).trials_completed == 1);
}

TEST_CASE("run_sweep: split trials merge to the single-process result")
{
    SweepSpec spec = small_spec();
    spec.trials = 4;
    const PhaseDiagram whole = run_sweep(spec);

    // Same records gathered as two halves and reduced once.
    for (std::size_t i = 0; i < spec.gA2_axis.size(); ++i) {
        for (std::size_t j = 0; j < spec.nsin2_axis.size(); ++j) {
            std::vector<TrialRecord> merged;
            for (int trial = 0; trial < 2; ++trial)
                merged.push_back(run_cell(spec, i, j, trial));
            for (int trial = 2; trial < 4; ++trial)
                merged.push_back(run_cell(spec, i, j, trial));
            const CellStats stats = reduce_trials(merged, spec.metrics);
            CHECK(std::abs(stats.mean.at("valid_time") -
                           whole.at(i, j).mean.at("valid_time")) <= 1e-12);
            CHECK(std::abs(stats.stddev.at("valid_time") -
                           whole.at(i, j).stddev.at("valid_time")) <= 1e-12);
        }
    }
}

TEST_CASE("run_sweep: result independent of worker count")
{
    SweepSpec spec = small_spec();
    const PhaseDiagram serial = run_sweep(spec);
    spec.workers = 2;
    const PhaseDiagram parallel = run_sweep(spec);
    for (std::size_t i = 0; i < spec.gA2_axis.size(); ++i)
        for (std::size_t j = 0; j < spec.nsin2_axis.size(); ++j)
            CHECK(serial.at(i, j).mean.at("valid_time") ==
                  parallel.at(i, j).mean.at("valid_time"));
}

TEST_CASE("marching_squares: constant field yields no contour")
{
    const std::vector<double> axis{0.0, 1.0, 2.0};
    const std::vector<std::vector<double>> values(3, std::vector<double>(3, 5.0));
    CHECK(marching_squares(axis, axis, values, 5.0).empty());
    CHECK(marching_squares(axis, axis, values, 1.0).empty());
}

TEST_CASE("marching_squares: linear ramp puts a vertical line at the level")
{
    // f(x, y) = x on a 5x4 grid; the level set x = 1.6 is a vertical line.
    std::vector<double> xs{0.0, 1.0, 2.0, 3.0, 4.0};
    std::vector<double> ys{0.0, 1.0, 2.0, 3.0};
    std::vector<std::vector<double>> values(5, std::vector<double>(4));
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 4; ++j) values[i][j] = xs[i];

    const auto lines = marching_squares(xs, ys, values, 1.6);
    REQUIRE_FALSE(lines.empty());
    std::size_t vertex_count = 0;
    for (const auto& line : lines)
        for (const auto& v : line) {
            CHECK(v[0] == doctest::Approx(1.6).epsilon(1e-12));
            ++vertex_count;
        }
    CHECK(vertex_count >= ys.size());
}

TEST_CASE("extract_contour: level outside the data range is empty")
{
    SweepSpec spec = small_spec();
    spec.trials = 1;
    const PhaseDiagram diagram = run_sweep(spec);
    const auto lines = extract_contour(diagram, "valid_time", 1e9);
    CHECK(lines.empty());
    CHECK_THROWS_AS(extract_contour(diagram, "nonexistent", 0.0), config_error);
}

TEST_CASE("sweep: axis validation")
{
    SweepSpec spec = small_spec();
    spec.gA2_axis = {1.0, 0.5};
    CHECK_THROWS_AS(run_sweep(spec), config_error);
    spec.gA2_axis = {};
    CHECK_THROWS_AS(run_sweep(spec), config_error);
    spec = small_spec();
    spec.trials = 0;
    CHECK_THROWS_AS(run_sweep(spec), config_error);
}
