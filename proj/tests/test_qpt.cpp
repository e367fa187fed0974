#include <catch2/catch_amalgamated.hpp>

#include "qcorr/qpt.hpp"

using namespace qcorr;
using Catch::Matchers::WithinAbs;

namespace {

SweepCurve synthetic(const std::vector<double>& xs, double (*f)(double)) {
    SweepCurve c;
    c.lambdas = xs;
    for (double x : xs) c.values.push_back(f(x));
    c.meta.spacing = xs[1] - xs[0];
    return c;
}

OptimizerConfig fast_cfg() {
    OptimizerConfig cfg;
    cfg.starts = 16;
    cfg.measurement_grid = 12;
    return cfg;
}

}  // namespace

TEST_CASE("finite differences on synthetic curves", "[qpt]") {
    auto xs = uniform_grid(0.0, 1.0, 11);

    SweepCurve flat = synthetic(xs, [](double) { return 2.5; });
    for (double v : derivative(flat).values) REQUIRE_THAT(v, WithinAbs(0.0, 1e-12));

    SweepCurve lin = synthetic(xs, [](double x) { return 3.0 * x - 1.0; });
    for (double v : derivative(lin).values) REQUIRE_THAT(v, WithinAbs(3.0, 1e-12));

    // Partial sums of interior central differences telescope back to the
    // midpoint-averaged curve for arbitrary data.
    SweepCurve arb = synthetic(xs, [](double x) { return std::sin(7 * x) + x * x; });
    SweepCurve da = derivative(arb);
    double h = xs[1] - xs[0], acc = 0.0;
    for (std::size_t k = 1; k + 1 < xs.size(); ++k) {
        acc += da.values[k] * h;
        double lhs =
            0.5 * (arb.values[k] + arb.values[k + 1]) - 0.5 * (arb.values[0] + arb.values[1]);
        REQUIRE_THAT(lhs, WithinAbs(acc, 1e-9));
    }

    SweepCurve tiny;
    tiny.lambdas = {0.0, 0.1};
    tiny.values = {1.0, 2.0};
    tiny.meta.spacing = 0.1;
    CHECK_THROWS_AS(derivative(tiny), TooFewPoints);
}

TEST_CASE("peak location on synthetic curves", "[qpt]") {
    auto xs = uniform_grid(-1.0, 1.0, 21);
    SweepCurve tri = synthetic(xs, [](double x) { return 1.0 - std::abs(x); });
    auto [pk, h] = locate_peak(tri);
    CHECK_THAT(pk, WithinAbs(0.0, 1e-15));
    CHECK_THAT(h, WithinAbs(1.0, 1e-15));

    auto xs2 = uniform_grid(-1.0, 1.0, 41);  // spacing 0.05
    static constexpr double ctr = 0.0137;
    SweepCurve gauss = synthetic(
        xs2, [](double x) { return std::exp(-(x - ctr) * (x - ctr) / (2 * 0.2 * 0.2)); });
    auto [gpk, gh] = locate_peak(gauss);
    CHECK_THAT(gpk, WithinAbs(ctr, 0.05 * 0.05));

    SweepCurve mono = synthetic(xs, [](double x) { return x; });
    CHECK_THROWS_AS(locate_peak(mono), NoInteriorPeak);
}

TEST_CASE("full width at half maximum on synthetic curves", "[qpt]") {
    auto xs = uniform_grid(-1.0, 1.0, 201);
    SweepCurve tri = synthetic(xs, [](double x) { return std::max(0.0, 1.0 - std::abs(x) / 0.6); });
    CHECK_THAT(fwhm(tri), WithinAbs(0.6, 1e-12));

    const double sigma = 0.15;
    auto xs2 = uniform_grid(-1.0, 1.0, 267);  // spacing ~sigma/20
    SweepCurve gauss = synthetic(xs2, [](double x) { return std::exp(-x * x / (2 * 0.15 * 0.15)); });
    CHECK_THAT(fwhm(gauss) / (2.354820045 * sigma), WithinAbs(1.0, 0.01));

    SweepCurve bump = synthetic(uniform_grid(-0.1, 0.1, 9), [](double x) { return 1.0 - x * x; });
    CHECK_THROWS_AS(fwhm(bump), HalfHeightNotBracketed);
}

TEST_CASE("log-log scaling fits", "[qpt]") {
    std::vector<ScalingSample> ss;
    for (int n : {64, 128, 256, 512, 1024})
        ss.push_back({n, 1.0 + std::pow(n, -1.5), std::pow(n, -0.36), 1.0});
    ScalingFit f = fit_scaling(ss, ScalingTarget::Fwhm);
    CHECK_THAT(f.exponent, WithinAbs(-0.36, 1e-6));
    CHECK_THAT(f.r_squared, WithinAbs(1.0, 1e-12));
    ScalingFit g = fit_scaling(ss, ScalingTarget::LambdaC);
    CHECK_THAT(g.exponent, WithinAbs(-1.5, 1e-6));

    CHECK_THROWS_AS(fit_scaling({ss.begin(), ss.begin() + 3}, ScalingTarget::Fwhm),
                    TooFewPoints);

    // Alternating samples have r^2 well below the acceptance floor.
    std::vector<ScalingSample> noisy;
    for (int i = 0; i < 4; ++i)
        noisy.push_back({64 << i, 1.0, (i % 2 == 0) ? 1.0 : 2.0, 1.0});
    CHECK_THROWS_AS(fit_scaling(noisy, ScalingTarget::Fwhm), DegenerateFit);
}

TEST_CASE("sweep input validation", "[qpt]") {
    OptimizerConfig cfg = fast_cfg();
    EntropyKind rs2 = EntropyKind::renyi_sandwiched(2.0);
    CHECK_THROWS_AS(sweep_discord({3.2, 3.3, 3.4}, IsingPoint{1.0, 0}, rs2, cfg),
                    InvalidState);
    CHECK_THROWS_AS(sweep_discord({0.5, 0.6, 0.75}, IsingPoint{1.0, 0}, rs2, cfg),
                    InvalidState);  // non-uniform spacing
    CHECK_THROWS_AS(sweep_discord({0.5}, IsingPoint{1.0, 0}, rs2, cfg), TooFewPoints);
}

TEST_CASE("sweeps are deterministic for a fixed seed", "[qpt]") {
    OptimizerConfig cfg = fast_cfg();
    cfg.starts = 8;
    EntropyKind rs2 = EntropyKind::renyi_sandwiched(2.0);
    auto grid = uniform_grid(0.9, 1.1, 5);
    SweepCurve a = sweep_discord(grid, IsingPoint{1.0, 16}, rs2, cfg);
    SweepCurve b = sweep_discord(grid, IsingPoint{1.0, 16}, rs2, cfg);
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) REQUIRE(a.values[i] == b.values[i]);
}

TEST_CASE("critical-region sweep of the infinite chain", "[qpt]") {
    OptimizerConfig cfg = fast_cfg();
    EntropyKind rs2 = EntropyKind::renyi_sandwiched(2.0);
    auto grid = uniform_grid(0.90, 1.10, 21);
    SweepCurve c = sweep_discord(grid, IsingPoint{1.0, 0}, rs2, cfg);
    for (double v : c.values) REQUIRE(v >= 0.0);
    auto [pk, h] = locate_peak(derivative(c));
    CHECK(pk > 0.95);
    CHECK(pk < 1.05);
    CHECK(h > 0.5);

    // The Tsallis curve must equal the value a direct linear-kind
    // optimization finds: the monotone family map preserves the argmin.
    SweepCurve t = sweep_discord(grid, IsingPoint{1.0, 0}, EntropyKind::linear(), cfg);
    DensityMatrix rho = nearest_neighbor_state(correlators_infinite(grid[10]));
    CorrelationResult direct = quantum_correlation(rho, EntropyKind::linear(), cfg);
    CHECK_THAT(t.values[10], WithinAbs(direct.quantum, 2e-5));
}

TEST_CASE("physical endpoints of the lambda range", "[qpt]") {
    OptimizerConfig cfg = fast_cfg();
    EntropyKind rs2 = EntropyKind::renyi_sandwiched(2.0);
    DensityMatrix lo = nearest_neighbor_state({-1.0, 0.0, 0.0, 0.0});
    CHECK_THAT(quantum_correlation(lo, rs2, cfg).quantum, WithinAbs(0.0, 1e-7));

    double d25 = quantum_correlation(
                     nearest_neighbor_state(correlators_infinite(2.5)), rs2, cfg)
                     .quantum;
    double d3 = quantum_correlation(
                    nearest_neighbor_state(correlators_infinite(3.0)), rs2, cfg)
                    .quantum;
    CHECK_THAT(d25, WithinAbs(0.312125, 2e-3));
    CHECK_THAT(d3, WithinAbs(0.279934, 2e-3));
    CHECK(d3 < d25);  // still decreasing toward the paramagnetic limit
}

TEST_CASE("N=64 scaling pipeline reproduces its reference", "[qpt]") {
    OptimizerConfig cfg = fast_cfg();
    EntropyKind rs2 = EntropyKind::renyi_sandwiched(2.0);
    auto samples = scaling_samples({64}, default_scaling_grid(), rs2, cfg);
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].n_sites == 64);
    CHECK_THAT(samples[0].lambda_c_n, WithinAbs(1.004306, 5e-4));
    CHECK_THAT(samples[0].peak_height, WithinAbs(1.3718, 5e-3));
    CHECK_THAT(samples[0].delta_n, WithinAbs(0.1397, 2e-3));
    CHECK(samples[0].delta_n > 0.0);
    CHECK(samples[0].lambda_c_n > 0.8);
    CHECK(samples[0].lambda_c_n < 1.2);
}
