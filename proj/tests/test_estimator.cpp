#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "estimator.hpp"

using namespace bsde;

namespace {

LocalPolynomialDriver table_driver(double lo, double hi, std::vector<double> monomials) {
    const int degree = static_cast<int>(monomials.size()) - 1;
    LocalPolynomialDriver d(KernelLayout(lo, hi, 1, 0.05), std::max(2, degree));
    PolyTable table(1, degree);
    double c_max = 0.0;
    for (int l = 0; l <= degree; ++l) {
        table.at(0, l) = monomials[l];
        c_max = std::max(c_max, std::abs(monomials[l]));
    }
    LocalPolynomialDriver::Term term;
    term.slices.push_back(std::move(table));
    d.add_term(std::move(term));
    d.set_coeff_bound(c_max);
    return d;
}

ParticleTree lone_root(double horizon, double lifetime, int offspring, double x) {
    ParticleTree tree;
    tree.dim = 1;
    tree.horizon = horizon;
    tree.nodes.push_back({-1, 1, 0.0, lifetime, lifetime, offspring});
    tree.pos_birth = {x};
    tree.pos_end = {x};
    return tree;
}

Dynamics frozen(double x0 = 0.0) { return Dynamics::zero(Box::interval(-2.0, 2.0), {x0}, 1.0); }

constexpr auto kNoPrior = [](double, const double*) { return 0.0; };

}  // namespace

TEST_CASE("a lone survivor carries the normalized terminal weight") {
    const BranchingLaw law({1.0}, 0.4);
    const auto d = LocalPolynomialDriver::zero(2, -1.0, 1.0);
    const auto tree = lone_root(1.0, 1.4, -1, 0.3);
    const double v = evaluate_functional(
        tree, [](const double*) { return 1.0; }, kNoPrior, 0.0, law, d);
    CHECK(v == doctest::Approx(std::exp(0.4)).epsilon(1e-14));
}

TEST_CASE("a root dying with no offspring carries the constant coefficient") {
    const BranchingLaw law({1.0}, 0.4);
    const double c = 0.37, s = 0.7;
    const auto d = table_driver(-1.0, 1.0, {c});
    const auto tree = lone_root(1.0, s, 0, 0.0);
    const double v = evaluate_functional(
        tree, [](const double*) { return 1.0; }, kNoPrior, 0.0, law, d);
    CHECK(v == doctest::Approx(c * std::exp(0.4 * s) / 0.4).epsilon(1e-13));
}

TEST_CASE("detailed weights multiply back to the functional value") {
    const BranchingLaw law = BranchingLaw::uniform(2, 1.0);
    const auto d = table_driver(-1.0, 1.0, {0.1, -0.2, 0.4});
    RandomStream rng(3);
    const double x0 = 0.0;
    for (int i = 0; i < 200; ++i) {
        const auto tree = simulate_tree(law, frozen(), std::span<const double>(&x0, 1), 0.8, rng);
        auto terminal = [](const double* x) { return 0.5 + 0.1 * x[0]; };
        auto prior = [](double, const double* x) { return 0.2 * x[0]; };
        const auto detail = evaluate_functional_detailed(tree, terminal, prior, 0.0, law, d);
        const double direct = evaluate_functional(tree, terminal, prior, 0.0, law, d);
        CHECK(detail.value == doctest::Approx(direct).epsilon(1e-12));
        CHECK(detail.survivor_weights.size() ==
              static_cast<std::size_t>(tree.survivor_count()));
        CHECK(detail.branch_weights.size() == static_cast<std::size_t>(tree.dead_count()));
        double prod = 1.0;
        for (double w : detail.survivor_weights) prod *= w;
        for (double w : detail.branch_weights) prod *= w;
        CHECK(prod == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("dominating weight bounds the functional on every tree") {
    const BranchingLaw law = BranchingLaw::uniform(2, 0.8);
    const auto d = table_driver(-1.0, 1.0, {0.3, -0.5, 0.9});
    const double M = 1.0;
    RandomStream rng(41);
    const double x0 = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto tree = simulate_tree(law, frozen(), std::span<const double>(&x0, 1), 0.4, rng);
        auto terminal = [M](const double* x) { return M * std::cos(3.0 * x[0]); };
        auto prior = [](double, const double* x) { return 0.5 * x[0]; };
        const double v = evaluate_functional(tree, terminal, prior, 0.0, law, d);
        const double cap = dominating_weight(tree, law, d.coeff_bound(), M);
        REQUIRE(std::abs(v) <= cap * (1.0 + 1e-12));
    }
}

TEST_CASE("quadratic driver with frozen diffusion solves the backward ODE") {
    // v' = -v^2, v(T) = 0.5, read at T - t = 0.5: 1/v is affine with unit
    // slope, so v(0) = 1 / (1/0.5 - 0.5) = 2/3.
    const BranchingLaw law({0.0, 0.0, 1.0}, 0.4);
    const auto d = table_driver(-1.0, 1.0, {0.0, 0.0, 1.0});
    McControls mc;
    mc.tol = 1e-4;  // force the cap
    mc.cap = 200'000;
    RandomStream rng = derive_stream(7, stream_tag::kUser);
    const double x0 = 0.0;
    const auto est = mc_estimate(
        0.0, 0.5, std::span<const double>(&x0, 1), [](const double*) { return 0.5; },
        [](double, const double*) { return 0.0; }, law, frozen(), d, mc, rng);
    CHECK(std::abs(est.mean - 2.0 / 3.0) <= 3.0 * est.std_err + 1e-3);
}

TEST_CASE("single-piece polynomial drivers match a fourth-order ODE oracle") {
    const double g0 = -0.3;
    const std::vector<double> coeffs{0.3, 0.5, -0.8};
    const auto d = table_driver(-1.5, 1.5, coeffs);
    auto f = [&](double y) { return coeffs[0] + y * (coeffs[1] + y * coeffs[2]); };
    // Fourth-order integration of u' = f(u), u(0) = g, evaluated at the
    // horizon; this is the backward solution read forward.
    const double h_circ = 1.0 / (3.0 * 1.0 * 2.0 * 0.8);
    const double horizon = 0.5 * h_circ;
    double u = g0;
    const int n_steps = 20000;
    const double dt = horizon / n_steps;
    for (int k = 0; k < n_steps; ++k) {
        const double k1 = f(u);
        const double k2 = f(u + 0.5 * dt * k1);
        const double k3 = f(u + 0.5 * dt * k2);
        const double k4 = f(u + dt * k3);
        u += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    const BranchingLaw law = BranchingLaw::uniform(2, 0.4);
    McControls mc;
    mc.tol = 2e-4;
    mc.cap = 400'000;
    RandomStream rng = derive_stream(11, stream_tag::kUser);
    const double x0 = 0.0;
    const auto est = mc_estimate(
        0.0, horizon, std::span<const double>(&x0, 1), [g0](const double*) { return g0; },
        [](double, const double*) { return 0.0; }, law, frozen(), d, mc, rng);
    CHECK(std::abs(est.mean - u) <= 3.0 * est.std_err + 1e-3);
}

TEST_CASE("driver-free estimation degenerates to plain terminal Monte Carlo") {
    const BranchingLaw law({1.0}, 0.4);
    const auto d = LocalPolynomialDriver::zero(2, -1.0, 1.0);
    Dynamics dyn = Dynamics::scalar(Box::interval(-4.0, 4.0), {0.2}, nullptr,
                                    [](const double*) { return 0.8; }, 0.01);
    const double horizon = 0.3;
    McControls mc;
    mc.tol = 1e-4;
    mc.cap = 100'000;
    RandomStream rng = derive_stream(13, stream_tag::kUser);
    const double x0 = 0.2;
    const auto est = mc_estimate(
        0.0, horizon, std::span<const double>(&x0, 1),
        [](const double* x) { return std::cos(x[0]); },
        [](double, const double*) { return 0.0; }, law, dyn, d, mc, rng);

    // Independent plain estimate of E[cos(X_h)].
    RandomStream rng2 = derive_stream(14, stream_tag::kUser);
    const long n = 200'000;
    double sum = 0.0, sum_sq = 0.0;
    for (long i = 0; i < n; ++i) {
        double x = x0;
        simulate_path(dyn, &x, horizon, rng2);
        const double v = std::cos(x);
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n);
    const double combined = std::sqrt(se * se + est.std_err * est.std_err);
    CHECK(std::abs(est.mean - mean) <= 3.0 * combined + 1e-4);
}

TEST_CASE("a deterministic integrand stops at the first batch with zero error") {
    // Zero driver and zero payoff: every tree evaluates to exactly zero.
    const BranchingLaw law({1.0}, 0.4);
    const auto d = LocalPolynomialDriver::zero(2, -1.0, 1.0);
    McControls mc;
    mc.tol = 1e-6;
    mc.cap = 10'000;
    mc.batch = 64;
    RandomStream rng(3);
    const double x0 = 0.0;
    const auto est = mc_estimate(
        0.0, 1.0, std::span<const double>(&x0, 1), [](const double*) { return 0.0; }, kNoPrior,
        law, frozen(), d, mc, rng);
    CHECK(est.mean == 0.0);
    CHECK(est.std_err == 0.0);
    CHECK(est.n_samples == 64);
    CHECK(!est.hit_cap);

    // Zero horizon: the functional equals the payoff at the start point.
    RandomStream rng2(4);
    const auto exact = mc_estimate(
        0.0, 0.0, std::span<const double>(&x0, 1), [](const double*) { return 0.7; }, kNoPrior,
        law, frozen(), d, mc, rng2);
    CHECK(exact.mean == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(exact.std_err <= 1e-8);
    CHECK(exact.n_samples == 64);
}

TEST_CASE("sample count tracks the variance over tolerance-squared budget") {
    // Payoff sign(X) on a Brownian path: variance close to exp(rate * horizon).
    const BranchingLaw law({1.0}, 0.4);
    const auto d = LocalPolynomialDriver::zero(2, -1.0, 1.0);
    Dynamics dyn = Dynamics::scalar(Box::interval(-50.0, 50.0), {0.0}, nullptr,
                                    [](const double*) { return 1.0; }, 0.01);
    McControls mc;
    mc.tol = 0.02;
    mc.cap = 100'000;
    mc.batch = 256;
    RandomStream rng = derive_stream(101, stream_tag::kUser);
    const double x0 = 0.0;
    const double horizon = 0.1;
    const auto est = mc_estimate(
        0.0, horizon, std::span<const double>(&x0, 1),
        [](const double* x) { return x[0] >= 0 ? 1.0 : -1.0; }, kNoPrior, law, dyn, d, mc, rng);
    const double predicted = std::exp(0.4 * horizon) / (mc.tol * mc.tol);
    CHECK(!est.hit_cap);
    CHECK(est.n_samples >= static_cast<long>(predicted * 0.8));
    CHECK(est.n_samples <= static_cast<long>(predicted * 1.3) + mc.batch);
}

TEST_CASE("truncate clamps and is idempotent") {
    CHECK(truncate(0.5, 1.0) == 0.5);
    CHECK(truncate(-7.0, 1.0) == -1.0);
    CHECK(truncate(7.0, 2.5) == 2.5);
    RandomStream rng(77);
    for (int i = 0; i < 1000; ++i) {
        const double v = 20.0 * (rng.uniform01() - 0.5);
        const double b = 0.01 + 5.0 * rng.uniform01();
        REQUIRE(truncate(truncate(v, b), b) == truncate(v, b));
        REQUIRE(std::abs(truncate(v, b)) <= b);
    }
}

TEST_CASE("tree overflow propagates out of the estimator") {
    const BranchingLaw law({0.0, 0.0, 1.0}, 80.0);
    const auto d = table_driver(-1.0, 1.0, {0.0, 0.0, 1.0});
    McControls mc;
    mc.node_cap = 32;
    RandomStream rng(5);
    const double x0 = 0.0;
    CHECK_THROWS_AS(mc_estimate(0.0, 2.0, std::span<const double>(&x0, 1),
                                [](const double*) { return 1.0; }, kNoPrior, law, frozen(), d,
                                mc, rng),
                    TreeOverflowError);
}

TEST_CASE("invalid controls are rejected") {
    const BranchingLaw law({1.0}, 0.4);
    const auto d = LocalPolynomialDriver::zero(2, -1.0, 1.0);
    const double x0 = 0.0;
    RandomStream rng(1);
    McControls bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(mc_estimate(0.0, 1.0, std::span<const double>(&x0, 1),
                                [](const double*) { return 0.0; }, kNoPrior, law, frozen(), d,
                                bad, rng),
                    std::invalid_argument);
    McControls bad2;
    bad2.batch = 1;
    CHECK_THROWS_AS(mc_estimate(0.0, 1.0, std::span<const double>(&x0, 1),
                                [](const double*) { return 0.0; }, kNoPrior, law, frozen(), d,
                                bad2, rng),
                    std::invalid_argument);
}
