#pragma once

#include <functional>
#include <vector>

#include "box.hpp"
#include "rng.hpp"

namespace bsde {

using DriftFn = std::function<void(const double* x, double* out)>;
// Row-major dim x dim matrix.
using VolFn = std::function<void(const double* x, double* out)>;

// Forward diffusion with coefficients supported on a compact box, simulated
// by the explicit Euler scheme. Every Euler node is clamped back into the
// box, so positions handed to grids and coefficient evaluations never leave
// the support.
struct Dynamics {
    int dim = 1;
    DriftFn drift;           // null means zero drift
    VolFn vol;               // null means zero volatility
    Box box;
    Vec x0;
    double euler_dt = 1e-2;

    static Dynamics zero(Box b, Vec start, double dt = 1e-2);
    // sigma(x) * identity
    static Dynamics scalar(Box b, Vec start, std::function<double(const double*)> mu_1d,
                           std::function<double(const double*)> sigma_scalar, double dt);
};

// Optionally recorded Euler nodes of one simulated branch.
struct PathRecord {
    std::vector<double> times;
    std::vector<double> positions;  // times.size() * dim, row-major
    void clear() {
        times.clear();
        positions.clear();
    }
};

// Euler steps of size dyn.euler_dt, plus one final partial step covering the
// remainder of `duration`. x is updated in place (length dyn.dim) and stays
// inside dyn.box. Rejects negative durations. When vol is set, consumes one
// gaussian per coordinate per step and nothing otherwise.
void simulate_path(const Dynamics& dyn, double* x, double duration, RandomStream& rng,
                   PathRecord* record = nullptr, double t_offset = 0.0);

}  // namespace bsde
