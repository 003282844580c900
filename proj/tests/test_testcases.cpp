#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "benchmarks.hpp"
#include "bounds.hpp"
#include "rng.hpp"

using namespace bsde;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("toy reference values") {
    const auto bench = toy_problem();
    const double x_mid = kPi / 2.0, x_quarter = kPi / 4.0;
    CHECK(bench.reference.value(1.0, &x_quarter) == doctest::Approx(std::cos(x_quarter)));
    CHECK(bench.reference.value(0.0, &x_mid) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(bench.reference.value(0.0, &x_quarter) ==
          doctest::Approx(std::exp(-0.5) * std::cos(kPi / 4.0)).epsilon(1e-13));
    // Evaluating the closed form: exp(-0.5) cos(pi/4) ~ 0.428882.
    CHECK(bench.reference.value(0.0, &x_quarter) == doctest::Approx(0.428882).epsilon(1e-5));
}

TEST_CASE("toy reference is certified by the residual oracle") {
    const auto bench = toy_problem();
    CHECK(bench.reference.certified);
    CHECK(bench.reference.residual <= 1e-6);
}

TEST_CASE("a perturbed candidate is rejected by the oracle") {
    const auto bench = toy_problem();
    const FieldFn shifted = [v = bench.reference.value](double t, const double* x) {
        return v(t, x) + 0.01;
    };
    const double residual = pde_residual(bench.problem, shifted);
    CHECK(residual >= 1e-3);  // driver sensitivity keeps it visibly nonzero
}

TEST_CASE("an all-zero problem has zero residual for constants") {
    Problem p;
    p.dynamics = Dynamics::zero(Box::interval(0.0, 1.0), {0.5}, 0.01);
    p.terminal = [](const double*) { return 0.3; };
    p.driver = nullptr;
    p.bound = 1.0;
    p.horizon = 1.0;
    const double residual = pde_residual(p, [](double, const double*) { return 0.3; });
    CHECK(residual == 0.0);
}

TEST_CASE("every benchmark terminal matches its reference at T") {
    RandomStream rng(5);
    for (const auto& name : benchmark_names()) {
        const auto bench = make_benchmark(name);
        const int d = bench.problem.dynamics.dim;
        const auto& box = bench.problem.dynamics.box;
        for (int s = 0; s < 1000; ++s) {
            double x[3];
            for (int a = 0; a < d; ++a)
                x[a] = box.lo[a] + (box.hi[a] - box.lo[a]) * rng.uniform01();
            REQUIRE(std::abs(bench.reference.value(bench.problem.horizon, x) -
                             bench.problem.terminal(x)) <= 1e-10);
            REQUIRE(std::abs(bench.reference.value(0.0, x)) <= bench.problem.bound);
            REQUIRE(std::abs(bench.problem.initial_prior(0.0, x)) <= bench.problem.bound);
        }
    }
}

TEST_CASE("hard problem 1 certifies; hard problem 2 does not") {
    const auto h1 = hard_problem_1();
    CHECK(h1.reference.certified);
    CHECK(h1.reference.residual <= 1e-6);

    const auto h2 = hard_problem_2(1);
    CHECK(!h2.reference.certified);
    CHECK(h2.reference.residual > 1e-3);  // reported, not silently ignored

    const auto h2_c = hard_problem_2(1, 0.5, 0.25);
    CHECK(!h2_c.reference.certified);
}

TEST_CASE("benchmark registry") {
    const auto names = benchmark_names();
    CHECK(names.size() == 5);
    for (const auto& n : names) CHECK_NOTHROW(make_benchmark(n));
    CHECK_THROWS_AS(make_benchmark("nope"), std::invalid_argument);
    CHECK_THROWS_AS(hard_problem_2(4), std::invalid_argument);
}

TEST_CASE("toy default config passes the horizon gate without an override") {
    const auto bench = toy_problem();
    const auto driver = bench.make_driver();
    const auto report = compute_bounds_report(driver, bench.problem.bound);
    const double h = bench.problem.horizon / bench.default_config.n_steps;
    CHECK(!bench.default_config.allow_horizon_override);
    CHECK(h < report.horizon);
    CHECK(driver.fit_residual() < 0.01);
    CHECK(driver.coeff_bound() > 0.0);
    CHECK(driver.kernel_lipschitz() ==
          doctest::Approx(1.0 / (0.05 * (bench.recipe.domain_hi - bench.recipe.domain_lo) /
                                 bench.recipe.n_pieces)));
}

TEST_CASE("hard benchmarks declare the override their truncation level requires") {
    for (const char* name : {"hard1", "hard2-1d"}) {
        const auto bench = make_benchmark(name);
        CHECK(bench.default_config.allow_horizon_override);
        const auto driver = bench.make_driver();
        const auto report = compute_bounds_report(driver, bench.problem.bound);
        // The level M = 50 pushes the horizon far below any usable step.
        CHECK(report.horizon < bench.problem.horizon / bench.default_config.n_steps);
    }
}

TEST_CASE("assembled toy driver tracks the true driver") {
    const auto bench = toy_problem();
    const auto driver = bench.make_driver();
    RandomStream rng(9);
    double worst = 0.0;
    for (int s = 0; s < 2000; ++s) {
        const double t = rng.uniform01();
        const double x = kPi / 8.0 + (6.0 * kPi / 8.0) * rng.uniform01();
        const double y = bench.recipe.domain_lo +
                         (bench.recipe.domain_hi - bench.recipe.domain_lo) * rng.uniform01();
        worst = std::max(worst,
                         std::abs(bench.problem.driver(t, &x, y) - driver.eval(t, &x, y, y)));
    }
    CHECK(worst <= driver.fit_residual() * (1.0 + 1e-9) + 1e-12);
    CHECK(worst < 0.005);
}

TEST_CASE("assembled separable driver is exact in its source term") {
    const auto bench = hard_problem_2(2);
    const auto driver = bench.make_driver();
    RandomStream rng(13);
    // At integer y the sine part of f1 vanishes from the fit error; probe
    // the exact f2 split through arbitrary (t, x) instead.
    for (int s = 0; s < 500; ++s) {
        const double t = rng.uniform01();
        double x[2] = {2.0 * rng.uniform01(), 2.0 * rng.uniform01()};
        const double y = 1.0 + 3.0 * rng.uniform01();
        const double err =
            std::abs(bench.problem.driver(t, x, y) - driver.eval(t, x, y, y));
        REQUIRE(err <= driver.fit_residual() * (1.0 + 1e-9) + 1e-12);
    }
    CHECK(driver.fit_residual() < 5e-4);  // cubic fit of the sine part only
}
