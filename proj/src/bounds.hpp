#pragma once

#include <utility>

#include "branching.hpp"
#include "local_poly.hpp"

namespace bsde {

// Guaranteed well-posedness window of the comparison ODE
//   eta' = sum_{l=0..degree} 2 C eta^l, eta(0) = M:
//   h = ((degree-1)(1-M)_+ + (1 v M)^{-(degree-1)}) / ((degree+1)(degree-1) 2C).
// Scheme periods must stay below it for the branching weights to stay
// integrable. Rejects C <= 0, M <= 0, degree < 2.
double explosion_horizon(double coeff_bound, int degree, double bound);

// A-priori growth level over [0, horizon]:
//   max(1, ((1 v M)^{1-degree} + (degree-1)(1-M)_+ - horizon degree (degree-1) 2C)^{1/(1-degree)}).
// Fails with "horizon too large" when the inner expression is not positive.
double growth_bound(double coeff_bound, int degree, double bound, double horizon);

// Fourth-order integration of the comparison ODE up to t <= explosion
// horizon, with step at most horizon / 1e4.
double solve_eta(double coeff_bound, int degree, double bound, double t);

struct MomentEstimate {
    double mean = 0.0;
    double std_err = 0.0;
};

// Monte Carlo means of (#alive * W) and (#born * W) at t = h, where W is the
// dominating weight. These are the constants entering the propagation of the
// per-step estimation error.
std::pair<MomentEstimate, MomentEstimate> moment_bounds(const BranchingLaw& law,
                                                        const LocalPolynomialDriver& driver,
                                                        double bound, double h, long n_trees,
                                                        RandomStream& rng);

struct BoundsReport {
    double coeff_bound = 0.0;
    int degree = 2;
    double bound = 1.0;       // M
    double horizon = 0.0;     // explosion horizon; +inf for a zero driver
    double growth = 1.0;      // M_{h}
    MomentEstimate m1, m2;    // filled when requested
    bool has_moments = false;

    double eta(double t) const { return solve_eta(coeff_bound, degree, bound, t); }
};

// Horizon/growth report for a driver at truncation level `bound`. A zero
// coefficient bound never explodes; the report then carries an infinite
// horizon and growth = max(1, bound).
BoundsReport compute_bounds_report(const LocalPolynomialDriver& driver, double bound);

}  // namespace bsde
