#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "branching.hpp"

using namespace bsde;

namespace {

Dynamics frozen() { return Dynamics::zero(Box::interval(-1.0, 1.0), {0.0}, 1.0); }

}  // namespace

TEST_CASE("law validation") {
    CHECK_THROWS_AS(BranchingLaw({0.5, 0.6}, 0.4), std::invalid_argument);
    CHECK_THROWS_AS(BranchingLaw({1.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(BranchingLaw({-0.1, 1.1}, 0.4), std::invalid_argument);
    const auto law = BranchingLaw::uniform(2, 0.4);
    CHECK(law.max_offspring() == 2);
    CHECK(law.mean_offspring() == doctest::Approx(1.0));
    CHECK(law.survival(1.0) == doctest::Approx(std::exp(-0.4)));
    CHECK(law.density(0.5) == doctest::Approx(0.4 * std::exp(-0.2)));
}

TEST_CASE("horizon zero gives a lone surviving root") {
    const auto law = BranchingLaw::uniform(2, 0.4);
    RandomStream rng(1);
    const double x0 = 0.0;
    const auto tree = simulate_tree(law, frozen(), std::span<const double>(&x0, 1), 0.0, rng);
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.is_survivor(0));
    CHECK(tree.label(0) == std::vector<int>{1});
    CHECK(tree.alive_at(0.0) == std::vector<int>{0});
    CHECK(tree.dead_in(0.0).empty());
}

TEST_CASE("p0 = 1 keeps the tree a single root") {
    const BranchingLaw law({1.0}, 0.4);
    RandomStream rng(5);
    const double x0 = 0.0;
    for (int i = 0; i < 200; ++i) {
        const auto tree = simulate_tree(law, frozen(), std::span<const double>(&x0, 1), 1.5, rng);
        REQUIRE(tree.nodes.size() == 1);
        const bool died = tree.nodes[0].death < 1.5;
        CHECK(tree.is_survivor(0) == !died);
        if (died) CHECK(tree.nodes[0].offspring == 0);
    }
}

TEST_CASE("structural invariants hold on a thousand trees") {
    const auto law = BranchingLaw::uniform(2, 1.2);
    RandomStream rng(17);
    const double x0 = 0.25;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto tree = simulate_tree(law, frozen(), std::span<const double>(&x0, 1), 1.0, rng);
        std::vector<int> child_count(tree.nodes.size(), 0);
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            const auto& node = tree.nodes[i];
            REQUIRE(node.death == node.birth + node.lifetime);
            if (i == 0) {
                CHECK(node.parent == -1);
                CHECK(node.birth == 0.0);
            } else {
                const auto& parent = tree.nodes[node.parent];
                REQUIRE(parent.death < tree.horizon);  // only dead nodes spawn
                CHECK(node.birth == parent.death);
                CHECK(node.child_ordinal == ++child_count[node.parent]);
                for (int a = 0; a < tree.dim; ++a)
                    CHECK(tree.birth_position(static_cast<int>(i))[a] ==
                          tree.end_position(node.parent)[a]);
                // Labels extend the parent's label by the ordinal.
                auto lbl = tree.label(static_cast<int>(i));
                auto parent_lbl = tree.label(node.parent);
                parent_lbl.push_back(node.child_ordinal);
                CHECK(lbl == parent_lbl);
            }
            if (tree.is_survivor(static_cast<int>(i))) {
                CHECK(node.offspring == -1);
            } else {
                CHECK(node.offspring >= 0);
            }
        }
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            if (!tree.is_survivor(static_cast<int>(i)))
                REQUIRE(child_count[i] == tree.nodes[i].offspring);
        }
    }
}

TEST_CASE("alive and dead sets partition the born population") {
    const auto law = BranchingLaw::uniform(2, 1.0);
    RandomStream rng(29);
    const double x0 = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto tree = simulate_tree(law, frozen(), std::span<const double>(&x0, 1), 2.0, rng);
        for (double t : {0.0, 0.3, 1.0, 1.7, 2.0}) {
            const auto alive = tree.alive_at(t);
            const auto dead = tree.dead_in(t);
            std::set<int> uni(alive.begin(), alive.end());
            for (int k : dead) {
                REQUIRE(!uni.count(k));
                uni.insert(k);
            }
            std::set<int> born;
            for (int i = 0; i < static_cast<int>(tree.nodes.size()); ++i)
                if (tree.nodes[i].birth <= t) born.insert(i);
            REQUIRE(uni == born);
        }
        CHECK_THROWS_AS(tree.alive_at(2.5), std::out_of_range);
        CHECK_THROWS_AS(tree.dead_in(-0.1), std::out_of_range);
    }
}

TEST_CASE("supercritical mean population matches the exponential growth law") {
    // p2 = 1, rate 0.4, horizon 1: E[#alive] = exp(0.4 (2 - 1) 1).
    const BranchingLaw law({0.0, 0.0, 1.0}, 0.4);
    RandomStream rng(101);
    const double x0 = 0.0;
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto tree = simulate_tree(law, frozen(), std::span<const double>(&x0, 1), 1.0, rng);
        const double a = tree.survivor_count();
        sum += a;
        sum_sq += a * a;
    }
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n);
    const double target = std::exp(0.4);
    CHECK(std::abs(mean - target) <= 3.0 * se);
}

TEST_CASE("critical mean population stays at one") {
    const BranchingLaw law({0.5, 0.0, 0.5}, 0.4);
    RandomStream rng(103);
    const double x0 = 0.0;
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto tree = simulate_tree(law, frozen(), std::span<const double>(&x0, 1), 2.0, rng);
        const double a = static_cast<double>(tree.alive_at(2.0).size());
        sum += a;
        sum_sq += a * a;
    }
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.0) <= 3.0 * se);
}

TEST_CASE("lifetime and offspring marginals") {
    const BranchingLaw law({0.3, 0.2, 0.5}, 0.7);
    RandomStream rng(211);
    const double x0 = 0.0;
    const int n = 100000;
    int above[3] = {0, 0, 0};
    long counts[3] = {0, 0, 0};
    long deaths = 0;
    const double levels[3] = {0.5, 1.0, 2.0};
    for (int i = 0; i < n; ++i) {
        // Horizon beyond the levels so the root lifetime is fully visible.
        const auto tree = simulate_tree(law, frozen(), std::span<const double>(&x0, 1), 2.5, rng);
        const double delta = tree.nodes[0].lifetime;
        for (int k = 0; k < 3; ++k) above[k] += delta > levels[k];
        if (!tree.is_survivor(0)) {
            ++deaths;
            ++counts[tree.nodes[0].offspring];
        }
    }
    for (int k = 0; k < 3; ++k) {
        const double p = std::exp(-0.7 * levels[k]);
        const double se = std::sqrt(p * (1 - p) / n);
        CHECK(std::abs(static_cast<double>(above[k]) / n - p) <= 4.0 * se);
    }
    for (int k = 0; k < 3; ++k) {
        const double p = law.offspring_probs[k];
        const double se = std::sqrt(p * (1 - p) / deaths);
        CHECK(std::abs(static_cast<double>(counts[k]) / deaths - p) <= 4.0 * se);
    }
}

TEST_CASE("node cap raises a descriptive overflow error") {
    const BranchingLaw law({0.0, 0.0, 1.0}, 50.0);  // very fast binary branching
    TreeSimOptions opts;
    opts.node_cap = 64;
    RandomStream rng(7);
    const double x0 = 0.0;
    ParticleTree tree;
    CHECK_THROWS_AS(
        simulate_tree(law, frozen(), std::span<const double>(&x0, 1), 5.0, rng, tree, opts),
        TreeOverflowError);
}

TEST_CASE("dump writes one labelled line per node") {
    const BranchingLaw law({0.0, 0.0, 1.0}, 2.0);
    RandomStream rng(3);
    const double x0 = 0.1;
    TreeSimOptions opts;
    opts.record_paths = true;
    const auto tree =
        simulate_tree(law, frozen(), std::span<const double>(&x0, 1), 1.0, rng, opts);
    std::ostringstream os;
    tree.dump(os);
    std::size_t lines = 0;
    for (char ch : os.str()) lines += ch == '\n';
    CHECK(lines == tree.nodes.size() + 1);  // header + nodes
    CHECK(os.str().find("(1)") != std::string::npos);
    CHECK(tree.paths.size() == tree.nodes.size());
}
