#pragma once

#include <optional>
#include <string>
#include <vector>

#include "local_poly.hpp"
#include "problem.hpp"
#include "scheme.hpp"

namespace bsde {

// Reference solution of a benchmark. The closed form is a candidate until it
// passes the PDE-residual oracle; an uncertified candidate must not be used
// for error reporting (self-convergence references are built by the caller).
struct Reference {
    FieldFn value;
    bool certified = false;
    double residual = 0.0;  // max PDE residual of the candidate
};

// How a benchmark's driver is localized: fit window in y, piece count,
// polynomial degree, kernel band, and the number of time slices used for
// time-dependent parts.
struct DriverRecipe {
    double domain_lo = -1.0;
    double domain_hi = 1.0;
    int n_pieces = 20;
    int degree = 2;
    double band_fraction = 0.05;
    int time_slices = 1;
};

struct BenchmarkProblem {
    std::string name;
    Problem problem;
    Reference reference;
    DriverRecipe recipe;
    SchemeConfig default_config;

    // Localized driver per the recipe (fields may be overridden first).
    LocalPolynomialDriver make_driver() const;
    LocalPolynomialDriver make_driver(int n_pieces, int degree) const;
};

// Max over an interior space-time sample of
//   dt v + mu . grad v + 1/2 tr(sigma sigma^T hess v) + f(t, x, v),
// by central finite differences with steps 1e-4. Certifies candidate
// reference solutions.
double pde_residual(const Problem& problem, const FieldFn& v_candidate, int n_t = 13,
                    int n_x_per_axis = 17);

// One-dimensional diffusion on [pi/8, 7pi/8] whose solution is
// exp(-(T-t)/2) cos x; bounded by one, the friendly regime for weight
// products.
BenchmarkProblem toy_problem();

// Time-dependent log-driver on [0, 2]; the closed form exp(Cx + (T-t)/2) is
// certified exactly.
BenchmarkProblem hard_problem_1(double C = 0.5, double T = 1.0);

// Separable sine driver on [0, 2]^d, dims 1 to 3. The candidate closed form
// exp(C mean(x) + (T-t)/2) fails certification (the displayed source term is
// not an exact match); error reporting then needs a self-convergence
// reference.
BenchmarkProblem hard_problem_2(int dim = 1, double C = 0.5, double c = 0.5, double T = 1.0);

std::vector<std::string> benchmark_names();
// Throws std::invalid_argument for unknown names. Parameters: C, c, T, dim.
BenchmarkProblem make_benchmark(const std::string& name, double C = 0.5, double c = 0.5,
                                double T = 1.0);

}  // namespace bsde
