#include "bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "estimator.hpp"

namespace bsde {

static void check_args(double coeff_bound, int degree, double bound) {
    if (!(coeff_bound > 0.0)) throw std::invalid_argument("bounds: coefficient bound must be > 0");
    if (degree < 2) throw std::invalid_argument("bounds: degree must be >= 2");
    if (!(bound > 0.0)) throw std::invalid_argument("bounds: bound must be > 0");
}

double explosion_horizon(double coeff_bound, int degree, double bound) {
    check_args(coeff_bound, degree, bound);
    const double pos_part = std::max(1.0 - bound, 0.0);
    const double numerator =
        (degree - 1) * pos_part + std::pow(std::max(1.0, bound), -(degree - 1));
    return numerator / ((degree + 1) * (degree - 1) * 2.0 * coeff_bound);
}

double growth_bound(double coeff_bound, int degree, double bound, double horizon) {
    check_args(coeff_bound, degree, bound);
    const double inner = std::pow(std::max(1.0, bound), 1 - degree) +
                         (degree - 1) * std::max(1.0 - bound, 0.0) -
                         horizon * degree * (degree - 1) * 2.0 * coeff_bound;
    if (!(inner > 0.0)) throw std::invalid_argument("growth_bound: horizon too large");
    return std::max(1.0, std::pow(inner, 1.0 / (1 - degree)));
}

double solve_eta(double coeff_bound, int degree, double bound, double t) {
    check_args(coeff_bound, degree, bound);
    const double h_max = explosion_horizon(coeff_bound, degree, bound);
    if (t < 0.0 || t > h_max * (1.0 + 1e-12))
        throw std::invalid_argument("solve_eta: t outside [0, explosion horizon]");
    if (t == 0.0) return bound;

    auto rhs = [&](double y) {
        double acc = 0.0, p = 1.0;
        for (int l = 0; l <= degree; ++l) {
            acc += p;
            p *= y;
        }
        return 2.0 * coeff_bound * acc;
    };
    const long n = std::max<long>(16, static_cast<long>(std::ceil(1e4 * t / h_max)));
    const double step = t / n;
    double y = bound;
    for (long k = 0; k < n; ++k) {
        const double k1 = rhs(y);
        const double k2 = rhs(y + 0.5 * step * k1);
        const double k3 = rhs(y + 0.5 * step * k2);
        const double k4 = rhs(y + step * k3);
        y += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

std::pair<MomentEstimate, MomentEstimate> moment_bounds(const BranchingLaw& law,
                                                        const LocalPolynomialDriver& driver,
                                                        double bound, double h, long n_trees,
                                                        RandomStream& rng) {
    if (n_trees < 2) throw std::invalid_argument("moment_bounds: need at least two trees");
    // Positions are irrelevant for the dominating weight; a frozen diffusion
    // keeps the simulation cheap.
    Dynamics dyn = Dynamics::zero(Box::interval(-1.0, 1.0), {0.0}, std::max(h, 1e-9));
    const double x0 = 0.0;
    ParticleTree tree;
    double s1 = 0.0, s1_sq = 0.0, s2 = 0.0, s2_sq = 0.0;
    for (long i = 0; i < n_trees; ++i) {
        simulate_tree(law, dyn, std::span<const double>(&x0, 1), h, rng, tree);
        const double w = dominating_weight(tree, law, driver.coeff_bound(), bound);
        const double alive = tree.survivor_count();
        const double born = static_cast<double>(tree.nodes.size());
        const double v1 = alive * w;
        const double v2 = born * w;
        s1 += v1;
        s1_sq += v1 * v1;
        s2 += v2;
        s2_sq += v2 * v2;
    }
    auto finish = [n_trees](double s, double ssq) {
        MomentEstimate est;
        est.mean = s / n_trees;
        const double var = std::max(0.0, (ssq - n_trees * est.mean * est.mean) / (n_trees - 1));
        est.std_err = std::sqrt(var / n_trees);
        return est;
    };
    return {finish(s1, s1_sq), finish(s2, s2_sq)};
}

BoundsReport compute_bounds_report(const LocalPolynomialDriver& driver, double bound) {
    BoundsReport report;
    report.coeff_bound = driver.coeff_bound();
    report.degree = std::max(2, driver.ell_max());
    report.bound = bound;
    if (report.coeff_bound > 0.0) {
        report.horizon = explosion_horizon(report.coeff_bound, report.degree, bound);
        report.growth = growth_bound(report.coeff_bound, report.degree, bound, report.horizon);
    } else {
        report.horizon = std::numeric_limits<double>::infinity();
        report.growth = std::max(1.0, bound);
    }
    return report;
}

}  // namespace bsde
