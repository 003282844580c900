#pragma once

#include <functional>
#include <string>

#include "dynamics.hpp"

namespace bsde {

using TerminalPayoff = std::function<double(const double* x)>;
// Original (not yet localized) driver, evaluated along the solution diagonal.
using DriverFn = std::function<double(double t, const double* x, double y)>;
// Deterministic function of time and space, used for priors and references.
using FieldFn = std::function<double(double t, const double* x)>;

// Terminal-value problem: forward diffusion on a compact box, bounded
// terminal condition, driver integrated backward in time.
struct Problem {
    Dynamics dynamics;
    TerminalPayoff terminal;       // g, |g| <= bound
    DriverFn driver;               // f(t, x, y); may be null for pure transport
    double bound = 1.0;            // M, the truncation level
    double horizon = 1.0;          // T
    FieldFn initial_prior;         // y(t, x), |y| <= bound, y(T, .) = g
    std::string name;
};

}  // namespace bsde
