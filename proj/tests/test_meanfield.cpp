#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "reslab/dynamics.hpp"
#include "reslab/errors.hpp"
#include "reslab/meanfield.hpp"
#include "reslab/rng.hpp"
#include "reslab/sweep.hpp"
#include "reslab/stats.hpp"

#include <cmath>

using namespace reslab;

namespace {

MeanFieldInput no_input(double gA2)
{
    MeanFieldInput mfi;
    mfi.gA2 = gA2;
    mfi.sin2 = 0.0;
    return mfi;
}

TimeSeries lorenz_y(Eigen::Index n_samples, std::uint64_t seed)
{
    return select_components(generate_series(OdeSystem::lorenz63(), 0.1, n_samples, seed),
                             {1});
}

}  // namespace

TEST_CASE("local_field_moments: delta at zero gives exactly zero")
{
    CHECK(local_field_moments(no_input(0.0), 0.0, 2) == 0.0);
    CHECK(local_field_moments(no_input(0.0), 1.0, 2) == 0.0);
    CHECK(local_field_moments(no_input(0.5), 0.0, 4) == 0.0);
}

TEST_CASE("local_field_moments: quadrature matches a Monte Carlo oracle")
{
    // E[tanh^2(Z)] with Z ~ Normal(0, 4), 1e7 seeded draws.
    const double var = 4.0;
    Rng rng(2024);
    const long draws = 10000000;
    double acc = 0.0, acc2 = 0.0;
    const double sd = std::sqrt(var);
    for (long i = 0; i < draws; ++i) {
        const double t = std::tanh(sd * rng.gaussian());
        acc += t * t;
        acc2 += t * t * t * t;
    }
    const double mc_mean = acc / draws;
    const double mc_se =
        std::sqrt((acc2 / draws - mc_mean * mc_mean) / static_cast<double>(draws));

    MeanFieldInput mfi = no_input(1.0);  // gA2 * sigma_r2 = 4 below
    const double quad = local_field_moments(mfi, var, 2);
    CHECK(std::abs(quad - mc_mean) <= 3.0 * mc_se);
}

TEST_CASE("local_field_moments: tanh^2 expectation stays below one")
{
    for (double v : {0.01, 0.5, 2.0, 25.0, 1e4})
        CHECK(local_field_moments(no_input(1.0), v, 2) < 1.0);
}

TEST_CASE("local_field_moments: power validation")
{
    CHECK_THROWS_AS(local_field_moments(no_input(1.0), 1.0, 3), config_error);
    MeanFieldInput needs_samples;
    needs_samples.gA2 = 1.0;
    needs_samples.sin2 = 0.5;
    CHECK_THROWS_AS(local_field_moments(needs_samples, 1.0, 2), config_error);
}

TEST_CASE("iterate_variance_map: subcritical no-input case pins the zero fixed point")
{
    const FixedPointResult fp = iterate_variance_map(no_input(0.5));
    CHECK(fp.converged);
    CHECK(fp.sigma_r_star2 == 0.0);
    CHECK(fp.d2_mean == 1.0);
}

TEST_CASE("iterate_variance_map: fixed-point residual is below 10 tol")
{
    const TimeSeries series = lorenz_y(2000, 3);
    const double tol = 1e-10;
    for (double gA2 : {0.1, 1.0, 10.0}) {
        for (double nsin2 : {0.01, 1.0}) {
            const MeanFieldInput mfi = MeanFieldInput::from_series(gA2, nsin2, series);
            const FixedPointResult fp = iterate_variance_map(mfi, tol);
            CHECK(fp.converged);
            const double residual =
                std::abs(fp.sigma_r_star2 -
                         local_field_moments(mfi, fp.sigma_r_star2, 2));
            CHECK(residual < 10.0 * tol);
        }
    }
}

TEST_CASE("iterate_variance_map: converges within 200 iterations across the plane")
{
    // The full phase-diagram grid, thinned input for speed.
    const TimeSeries series = lorenz_y(2000, 5);
    for (double gA2 : log_spaced(1e-6, 1e2, 12)) {
        for (double nsin2 : log_spaced(1e-5, 1e2, 12)) {
            const MeanFieldInput mfi =
                MeanFieldInput::from_series(gA2, nsin2, series, 200);
            const FixedPointResult fp = iterate_variance_map(mfi, 1e-10, 200);
            CAPTURE(gA2);
            CAPTURE(nsin2);
            CHECK(fp.converged);
            CHECK(fp.iterations <= 200);
        }
    }
}

TEST_CASE("iterate_variance_map: d2 lies in (0, 1], equal to one only at zero variance")
{
    const TimeSeries series = lorenz_y(1500, 7);
    for (double gA2 : {0.0, 0.5, 2.0, 20.0}) {
        for (double nsin2 : {0.0, 0.05, 1.0}) {
            MeanFieldInput mfi = MeanFieldInput::from_series(gA2, nsin2, series);
            mfi.sin2 = nsin2;
            const FixedPointResult fp = iterate_variance_map(mfi);
            CHECK(fp.d2_mean > 0.0);
            CHECK(fp.d2_mean <= 1.0);
            CHECK(fp.r4_mean <= fp.sigma_r_star2 + 1e-12);
            CHECK(fp.sigma_r_star2 >= 0.0);
            CHECK(fp.sigma_r_star2 < 1.0);
            if (fp.sigma_r_star2 == 0.0)
                CHECK(fp.d2_mean == 1.0);
            else
                CHECK(fp.d2_mean < 1.0);
        }
    }
}

TEST_CASE("meanfield_lyapunov: subcritical closed form is exact")
{
    CHECK(std::abs(meanfield_lyapunov(no_input(0.01)) - 0.5 * std::log(0.01)) <= 1e-9);
    CHECK(meanfield_lyapunov(no_input(0.0)) == -50.0);
}

TEST_CASE("meanfield_lyapunov: strictly increasing in the gain")
{
    const TimeSeries series = lorenz_y(1500, 9);
    double prev = -1e9;
    for (double gA2 : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const double lam =
            meanfield_lyapunov(MeanFieldInput::from_series(gA2, 0.3, series));
        CHECK(lam > prev);
        prev = lam;
    }
}

TEST_CASE("zero_contour: vanishing input crosses at gA2 = 1")
{
    const TimeSeries series = lorenz_y(1000, 11);
    std::vector<Eigen::VectorXd> samples;
    for (Eigen::Index t = 0; t < series.length(); ++t)
        samples.push_back(series.samples.col(t));

    const auto contour = zero_contour(samples, 1, 1e-3, 1e3, {1e-9});
    REQUIRE(contour.size() == 1);
    CHECK(contour[0].gA2 == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("zero_contour: crossing gain is non-decreasing in the input scale")
{
    const TimeSeries series = lorenz_y(1500, 13);
    std::vector<Eigen::VectorXd> samples;
    for (Eigen::Index t = 0; t < series.length(); ++t)
        samples.push_back(series.samples.col(t));

    const std::vector<double> grid{1e-4, 1e-2, 1e-1, 1.0, 10.0, 100.0};
    const auto contour = zero_contour(samples, 1, 1e-3, 1e4, grid);
    REQUIRE(contour.size() == grid.size());
    for (std::size_t k = 0; k + 1 < contour.size(); ++k)
        CHECK(contour[k + 1].gA2 >= contour[k].gA2 * (1.0 - 1e-9));
}

TEST_CASE("zero_contour: stable under bracket refinement")
{
    const TimeSeries series = lorenz_y(1000, 17);
    std::vector<Eigen::VectorXd> samples;
    for (Eigen::Index t = 0; t < series.length(); ++t)
        samples.push_back(series.samples.col(t));

    const std::vector<double> grid{0.5};
    const auto wide = zero_contour(samples, 1, 1e-3, 1e3, grid);
    const auto narrow = zero_contour(samples, 1, 1e-1, 1e2, grid);
    REQUIRE(wide.size() == 1);
    REQUIRE(narrow.size() == 1);
    CHECK(std::abs(std::log(wide[0].gA2) - std::log(narrow[0].gA2)) <= 1e-3);
}

TEST_CASE("zero_contour: grid values without a sign change are omitted")
{
    const TimeSeries series = lorenz_y(500, 19);
    std::vector<Eigen::VectorXd> samples;
    for (Eigen::Index t = 0; t < series.length(); ++t)
        samples.push_back(series.samples.col(t));
    // gA2 range entirely subcritical: no crossing anywhere.
    const auto contour = zero_contour(samples, 1, 1e-4, 1e-1, {0.1, 1.0});
    CHECK(contour.empty());
}
