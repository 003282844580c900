#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rng.hpp"

using namespace bsde;

TEST_CASE("derived streams are reproducible and distinct") {
    RandomStream a = derive_stream(7, stream_tag::kSchemeNode, 3, 0, 11);
    RandomStream b = derive_stream(7, stream_tag::kSchemeNode, 3, 0, 11);
    RandomStream c = derive_stream(7, stream_tag::kSchemeNode, 3, 0, 12);
    bool all_equal = true, any_diff_c = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.raw();
        all_equal = all_equal && (va == b.raw());
        any_diff_c = any_diff_c || (va != c.raw());
    }
    CHECK(all_equal);
    CHECK(any_diff_c);
}

TEST_CASE("uniform01 stays in [0,1) and uniform_pos in (0,1]") {
    RandomStream rng(42);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double v = rng.uniform_pos();
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("gaussian moments") {
    RandomStream rng(2024);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sum_sq += g * g;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("exponential survival matches the closed form") {
    RandomStream rng(5);
    const double rate = 0.4;
    const int n = 100000;
    int above_half = 0, above_one = 0, above_two = 0;
    for (int i = 0; i < n; ++i) {
        const double e = rng.exponential(rate);
        above_half += e > 0.5;
        above_one += e > 1.0;
        above_two += e > 2.0;
    }
    auto check_level = [&](int count, double t) {
        const double p = std::exp(-rate * t);
        const double se = std::sqrt(p * (1 - p) / n);
        CHECK(std::abs(static_cast<double>(count) / n - p) < 4.0 * se);
    };
    check_level(above_half, 0.5);
    check_level(above_one, 1.0);
    check_level(above_two, 2.0);
}

TEST_CASE("categorical frequencies match the weights") {
    RandomStream rng(9);
    const std::vector<double> probs{0.2, 0.5, 0.3};
    const int n = 100000;
    std::vector<int> counts(3, 0);
    for (int i = 0; i < n; ++i) ++counts[rng.categorical(probs)];
    for (int k = 0; k < 3; ++k) {
        const double se = std::sqrt(probs[k] * (1 - probs[k]) / n);
        CHECK(std::abs(static_cast<double>(counts[k]) / n - probs[k]) < 4.0 * se);
    }
}
