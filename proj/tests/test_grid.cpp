#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "rng.hpp"
#include "value_grid.hpp"

using namespace bsde;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("construction splits each axis into equal cells") {
    ValueGrid g(Box::interval(kPi / 8.0, 7.0 * kPi / 8.0), 0.4, InterpMode::Linear);
    CHECK(g.dim() == 1);
    CHECK(g.axis(0).size() == 7);  // ceil(2.356 / 0.4) = 6 cells
    CHECK(g.axis(0).front() == kPi / 8.0);
    CHECK(g.axis(0).back() == 7.0 * kPi / 8.0);
    CHECK(g.num_nodes() == 7);
    CHECK_THROWS_AS(ValueGrid(Box::cube(4, 0.0, 1.0), 0.2, InterpMode::Linear),
                    std::invalid_argument);
}

TEST_CASE("interpolation is exact on the node set in both modes") {
    for (auto mode : {InterpMode::Linear, InterpMode::MonotoneQuadratic}) {
        ValueGrid g(Box::cube(2, -1.0, 2.0), 0.35, mode);
        g.set_from([](const double* x) { return std::sin(3 * x[0]) + std::cos(2 * x[1]); });
        double coords[2];
        for (long i = 0; i < g.num_nodes(); ++i) {
            g.node_coords(i, coords);
            REQUIRE(g.interpolate(coords) == doctest::Approx(g.node_value(i)).epsilon(1e-14));
        }
    }
}

TEST_CASE("affine fields are reproduced exactly") {
    auto f = [](const double* x) { return 0.3 - 1.7 * x[0] + 0.9 * x[1] + 0.2 * x[2]; };
    RandomStream rng(13);
    for (auto mode : {InterpMode::Linear, InterpMode::MonotoneQuadratic}) {
        ValueGrid g(Box::cube(3, -0.5, 1.5), 0.3, mode);
        g.set_from(f);
        for (int i = 0; i < 1000; ++i) {
            double x[3];
            for (double& v : x) v = -0.5 + 2.0 * rng.uniform01();
            REQUIRE(std::abs(g.interpolate(x) - f(x)) <= 1e-10);
        }
    }
}

TEST_CASE("monotone-quadratic beats linear on the cosine and respects the envelope") {
    const double lo = kPi / 8.0, hi = 7.0 * kPi / 8.0;
    ValueGrid lin(Box::interval(lo, hi), 0.2, InterpMode::Linear);
    ValueGrid quad(Box::interval(lo, hi), 0.2, InterpMode::MonotoneQuadratic);
    auto f = [](const double* x) { return std::cos(x[0]); };
    lin.set_from(f);
    quad.set_from(f);

    double worst_lin = 0.0, worst_quad = 0.0;
    for (int s = 0; s <= 5000; ++s) {
        const double x = lo + (hi - lo) * s / 5000.0;
        worst_lin = std::max(worst_lin, std::abs(lin.interpolate(&x) - std::cos(x)));
        worst_quad = std::max(worst_quad, std::abs(quad.interpolate(&x) - std::cos(x)));
    }
    CHECK(worst_quad <= worst_lin);
    CHECK(worst_quad < 5e-4);

    // No query may leave the local node-value envelope.
    const auto& ax = quad.axis(0);
    for (int s = 0; s <= 5000; ++s) {
        const double x = lo + (hi - lo) * s / 5000.0;
        const double v = quad.interpolate(&x);
        long cell = static_cast<long>((x - lo) / (ax[1] - ax[0]));
        cell = std::min<long>(cell, static_cast<long>(ax.size()) - 2);
        const double a = quad.node_value(cell), b = quad.node_value(cell + 1);
        REQUIRE(v >= std::min(a, b) - 1e-14);
        REQUIRE(v <= std::max(a, b) + 1e-14);
    }
}

TEST_CASE("random fields never overshoot the local envelope") {
    RandomStream rng(7);
    for (int dim = 1; dim <= 3; ++dim) {
        ValueGrid g(Box::cube(dim, 0.0, 1.0), 0.26, InterpMode::MonotoneQuadratic);
        for (int trial = 0; trial < 20; ++trial) {
            g.map_nodes([&](double) { return 2.0 * rng.uniform01() - 1.0; });
            double global_min = 1e300, global_max = -1e300;
            for (long i = 0; i < g.num_nodes(); ++i) {
                global_min = std::min(global_min, g.node_value(i));
                global_max = std::max(global_max, g.node_value(i));
            }
            for (int q = 0; q < 200; ++q) {
                double x[3];
                for (int a = 0; a < dim; ++a) x[a] = rng.uniform01();
                const double v = g.interpolate(x);
                REQUIRE(v >= global_min - 1e-12);
                REQUIRE(v <= global_max + 1e-12);
            }
        }
    }
}

TEST_CASE("set_from and map_nodes compose") {
    ValueGrid g(Box::interval(0.0, 1.0), 0.1, InterpMode::Linear);
    g.set_from([](const double*) { return 0.0; });
    const double mid = 0.37;
    CHECK(g.interpolate(&mid) == 0.0);
    g.set_from([](const double* x) { return 3.0 * x[0] - 1.0; });
    g.map_nodes([](double v) { return std::clamp(v, -0.5, 0.5); });
    for (long i = 0; i < g.num_nodes(); ++i) {
        REQUIRE(g.node_value(i) >= -0.5);
        REQUIRE(g.node_value(i) <= 0.5);
    }
}

TEST_CASE("queries outside the box fail beyond the clamp tolerance") {
    ValueGrid g(Box::interval(0.0, 1.0), 0.25, InterpMode::Linear);
    g.set_from([](const double* x) { return x[0]; });
    const double just_outside = 1.0 + 5e-10;
    CHECK(g.interpolate(&just_outside) == doctest::Approx(1.0));
    const double far_outside = 1.1;
    CHECK_THROWS_AS(g.interpolate(&far_outside), std::out_of_range);
}

TEST_CASE("csv export carries one row per node") {
    ValueGrid g(Box::cube(2, 0.0, 1.0), 0.5, InterpMode::Linear);
    g.set_from([](const double* x) { return x[0] + 10.0 * x[1]; });
    std::ostringstream os;
    g.write_csv(os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x1,x2,value");
    long rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == g.num_nodes());
}
