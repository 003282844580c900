#include "dynamics.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace bsde {

Dynamics Dynamics::zero(Box b, Vec start, double dt) {
    Dynamics d;
    d.dim = b.dim();
    d.box = std::move(b);
    d.x0 = std::move(start);
    d.euler_dt = dt;
    return d;
}

Dynamics Dynamics::scalar(Box b, Vec start, std::function<double(const double*)> mu_1d,
                          std::function<double(const double*)> sigma_scalar, double dt) {
    Dynamics d;
    d.dim = b.dim();
    const int n = d.dim;
    if (mu_1d) {
        if (n == 1) {
            d.drift = [mu = std::move(mu_1d)](const double* x, double* out) { out[0] = mu(x); };
        } else {
            throw std::invalid_argument("scalar dynamics: drift helper is 1-d only");
        }
    }
    if (sigma_scalar) {
        d.vol = [s = std::move(sigma_scalar), n](const double* x, double* out) {
            const double v = s(x);
            std::memset(out, 0, sizeof(double) * n * n);
            for (int i = 0; i < n; ++i) out[i * n + i] = v;
        };
    }
    d.box = std::move(b);
    d.x0 = std::move(start);
    d.euler_dt = dt;
    return d;
}

// Number of steps is fixed up front (full steps plus one partial remainder),
// so the count of engine draws depends only on (duration, euler_dt, dim).
void simulate_path(const Dynamics& dyn, double* x, double duration, RandomStream& rng,
                   PathRecord* record, double t_offset) {
    if (duration < 0.0) throw std::invalid_argument("simulate_path: negative duration");
    const int n = dyn.dim;
    dyn.box.clamp(x);
    if (record) {
        record->times.push_back(t_offset);
        record->positions.insert(record->positions.end(), x, x + n);
    }
    if (duration == 0.0) return;

    const long n_full = static_cast<long>(duration / dyn.euler_dt);
    const double last = duration - static_cast<double>(n_full) * dyn.euler_dt;

    double mu[kMaxDim];
    double sig[kMaxDim * kMaxDim];
    double noise[kMaxDim];
    double xp[kMaxDim];

    double t = t_offset;
    const long n_steps = n_full + (last > 0.0 ? 1 : 0);
    for (long k = 0; k < n_steps; ++k) {
        const double dt = (k < n_full) ? dyn.euler_dt : last;
        const double sdt = std::sqrt(dt);
        for (int i = 0; i < n; ++i) xp[i] = x[i];
        if (dyn.drift) {
            dyn.drift(xp, mu);
            for (int i = 0; i < n; ++i) x[i] += mu[i] * dt;
        }
        if (dyn.vol) {
            dyn.vol(xp, sig);
            for (int j = 0; j < n; ++j) noise[j] = rng.gaussian();
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j) acc += sig[i * n + j] * noise[j];
                x[i] += sdt * acc;
            }
        }
        dyn.box.clamp(x);
        t += dt;
        if (record) {
            record->times.push_back(t);
            record->positions.insert(record->positions.end(), x, x + n);
        }
    }
}

}  // namespace bsde
