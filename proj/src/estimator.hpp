#pragma once

#include <functional>

#include "branching.hpp"
#include "local_poly.hpp"

namespace bsde {

// Terminal payoff at the end of the current interval, as a function of the
// end position. Prior takes the absolute branch time and the branch position.
using TerminalFn = std::function<double(const double* x)>;
using PriorFn = std::function<double(double t_abs, const double* x)>;

struct McEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    long n_samples = 0;
    bool hit_cap = false;
};

// Per-node weights of one functional evaluation: the product of survivor
// terms phi(end) / survival(horizon - birth) and branch terms
// sum_j a_{j,xi}(t+T_k, pos) phi_j(prior) / (p_xi rho(delta)).
struct WeightBreakdown {
    std::vector<double> survivor_weights;
    std::vector<double> branch_weights;
    double value = 1.0;
};

double evaluate_functional(const ParticleTree& tree, const TerminalFn& terminal,
                           const PriorFn& prior, double t, const BranchingLaw& law,
                           const LocalPolynomialDriver& driver);

WeightBreakdown evaluate_functional_detailed(const ParticleTree& tree, const TerminalFn& terminal,
                                             const PriorFn& prior, double t,
                                             const BranchingLaw& law,
                                             const LocalPolynomialDriver& driver);

// Product of M / survival over live particles and 2C / (p rho) over dead
// ones: the weight that dominates |V| when |phi| <= M and |a| <= C.
double dominating_weight(const ParticleTree& tree, const BranchingLaw& law, double coeff_bound,
                         double bound);

struct McControls {
    double tol = 0.002;
    long cap = 10'000;
    long batch = 256;
    long node_cap = 1'000'000;
};

// Averages evaluate_functional over independent trees on [t, t_next) in
// batches until the standard error drops below tol or the sample cap is
// reached. Deterministic given the stream.
//
// The rule trusts the empirical variance: a batch of identical samples stops
// immediately with zero error. Where the functional is almost surely constant
// except for rare branch events (frozen diffusion, short horizons), the batch
// must be large enough that an all-identical batch is implausible, or the
// returned mean is conditioned on "no branch seen" and biased by roughly
// rate * horizon relative terms. batch = 256 with rate * horizon >= 0.02 keeps
// that probability below 1e-2; larger batches extinguish it.
McEstimate mc_estimate(double t, double t_next, std::span<const double> x,
                       const TerminalFn& terminal, const PriorFn& prior, const BranchingLaw& law,
                       const Dynamics& dyn, const LocalPolynomialDriver& driver,
                       const McControls& mc, RandomStream& rng);

inline double truncate(double v, double bound) { return std::clamp(v, -bound, bound); }

}  // namespace bsde
