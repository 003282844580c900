#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bounds.hpp"
#include "estimator.hpp"
#include "problem.hpp"
#include "value_grid.hpp"

namespace bsde {

enum class Method { A, B, Picard };

struct SchemeConfig {
    Method method = Method::A;
    int n_steps = 20;             // N_h; macro step h = T / N_h
    int n_substeps = 1;           // Method B sub-grid per macro step
    int picard_iterations = 3;    // Picard only
    double mc_tol = 0.002;
    long mc_cap = 10'000;
    long mc_batch = 256;
    double euler_dt = 0.002;      // overrides the problem dynamics step
    double grid_step = 0.2;
    InterpMode interp = InterpMode::MonotoneQuadratic;
    BranchingLaw law;             // offspring law and lifetime rate
    std::uint64_t seed = 1;
    int workers = 0;              // 0 means hardware concurrency
    bool allow_horizon_override = false;
    long node_cap = 1'000'000;
};

struct HorizonGateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepStats {
    double t = 0.0;
    double wall_seconds = 0.0;
    long cap_hits = 0;
    long points = 0;
    long mc_samples = 0;
};

struct SchemeResult {
    std::vector<double> dates;                      // t_0 .. t_{N_h}
    std::vector<ValueGrid> grids;                   // one per date
    std::vector<std::vector<McEstimate>> node_mc;   // per date (empty at T), per node
    std::vector<StepStats> stats;
    BoundsReport bounds;
};

// Backward sweep; the prior fed to the localization kernels is the same
// interpolated estimate as the terminal argument, taken from the next date.
SchemeResult run_method_a(const Problem& problem, const LocalPolynomialDriver& driver,
                          const SchemeConfig& cfg);

// As Method A but each macro interval carries a backward-swept sub-grid; the
// prior at a branch time is read from the first sub-date at or after it.
// With one substep this is exactly Method A.
SchemeResult run_method_b(const Problem& problem, const LocalPolynomialDriver& driver,
                          const SchemeConfig& cfg);

// Full Picard iteration: iterate m solves the whole backward sweep against
// the prior interpolated linearly in time from iterate m-1. Element 0 of the
// returned vector holds the initial prior sampled on the grids.
std::vector<SchemeResult> run_picard(const Problem& problem, const LocalPolynomialDriver& driver,
                                     const SchemeConfig& cfg);

SchemeResult run_scheme(const Problem& problem, const LocalPolynomialDriver& driver,
                        const SchemeConfig& cfg);

}  // namespace bsde
