#include "benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bsde {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Vec> box_sample(const Box& box, int per_axis) {
    const int d = box.dim();
    std::vector<Vec> out;
    std::vector<int> idx(d, 0);
    for (;;) {
        Vec x(d);
        for (int a = 0; a < d; ++a)
            x[a] = box.lo[a] + (box.hi[a] - box.lo[a]) * idx[a] / (per_axis - 1);
        out.push_back(std::move(x));
        int a = 0;
        while (a < d && ++idx[a] == per_axis) idx[a++] = 0;
        if (a == d) break;
    }
    return out;
}

// Residual of the full driver representation over a (t, x, y) sample.
double representation_residual(const Problem& problem, const LocalPolynomialDriver& d,
                               int n_t = 9, int n_x = 9, int n_y = 201) {
    double worst = 0.0;
    const auto xs = box_sample(problem.dynamics.box, n_x);
    for (int it = 0; it < n_t; ++it) {
        const double t = problem.horizon * it / (n_t - 1);
        for (const auto& x : xs) {
            for (int iy = 0; iy < n_y; ++iy) {
                const double y =
                    d.domain_lo() + (d.domain_hi() - d.domain_lo()) * iy / (n_y - 1);
                worst = std::max(
                    worst, std::abs(problem.driver(t, x.data(), y) - d.eval(t, x.data(), y, y)));
            }
        }
    }
    return worst;
}

// Lipschitz estimate of y -> f_fit(t, x, y, y) over the fit window.
double diagonal_slope(const Problem& problem, const LocalPolynomialDriver& d, int n_t = 9,
                      int n_x = 9, int n_y = 801) {
    double worst = 0.0;
    const auto xs = box_sample(problem.dynamics.box, n_x);
    const double step = (d.domain_hi() - d.domain_lo()) / n_y;
    for (int it = 0; it < n_t; ++it) {
        const double t = problem.horizon * it / (n_t - 1);
        for (const auto& x : xs) {
            double prev = d.eval(t, x.data(), d.domain_lo(), d.domain_lo());
            for (int iy = 1; iy <= n_y; ++iy) {
                const double y = d.domain_lo() + step * iy;
                const double cur = d.eval(t, x.data(), y, y);
                worst = std::max(worst, std::abs(cur - prev) / step);
                prev = cur;
            }
        }
    }
    return worst;
}

}  // namespace

double pde_residual(const Problem& problem, const FieldFn& v, int n_t, int n_x_per_axis) {
    const double ht = 1e-4, hx = 1e-4;
    const Box& box = problem.dynamics.box;
    const int d = box.dim();
    const double T = problem.horizon;

    double worst = 0.0;
    double mu[kMaxDim], sig[kMaxDim * kMaxDim];
    const auto xs = box_sample(
        Box([&] {
            Vec lo(box.lo), hi(box.hi);
            for (int a = 0; a < d; ++a) {
                const double margin = 1e-3 * (box.hi[a] - box.lo[a]);
                lo[a] += margin;
                hi[a] -= margin;
            }
            return Box(lo, hi);
        }()),
        n_x_per_axis);

    for (int it = 0; it < n_t; ++it) {
        const double t = ht + (T - 2 * ht) * it / (n_t - 1);
        for (const auto& xv : xs) {
            const double* x = xv.data();
            const double v0 = v(t, x);
            double residual = (v(t + ht, x) - v(t - ht, x)) / (2 * ht);

            if (problem.dynamics.drift) {
                problem.dynamics.drift(x, mu);
            } else {
                std::fill(mu, mu + d, 0.0);
            }
            if (problem.dynamics.vol) {
                problem.dynamics.vol(x, sig);
            } else {
                std::fill(sig, sig + d * d, 0.0);
            }

            double xp[kMaxDim];
            for (int a = 0; a < d; ++a) {
                std::copy(x, x + d, xp);
                xp[a] = x[a] + hx;
                const double up = v(t, xp);
                xp[a] = x[a] - hx;
                const double um = v(t, xp);
                residual += mu[a] * (up - um) / (2 * hx);
            }
            // 1/2 tr(sigma sigma^T hess v)
            for (int a = 0; a < d; ++a) {
                for (int b = 0; b < d; ++b) {
                    double ssa = 0.0;
                    for (int k = 0; k < d; ++k) ssa += sig[a * d + k] * sig[b * d + k];
                    if (ssa == 0.0) continue;
                    double second;
                    if (a == b) {
                        std::copy(x, x + d, xp);
                        xp[a] = x[a] + hx;
                        const double up = v(t, xp);
                        xp[a] = x[a] - hx;
                        const double um = v(t, xp);
                        second = (up - 2 * v0 + um) / (hx * hx);
                    } else {
                        double quad = 0.0;
                        for (int sa : {1, -1})
                            for (int sb : {1, -1}) {
                                std::copy(x, x + d, xp);
                                xp[a] = x[a] + sa * hx;
                                xp[b] = x[b] + sb * hx;
                                quad += sa * sb * v(t, xp);
                            }
                        second = quad / (4 * hx * hx);
                    }
                    residual += 0.5 * ssa * second;
                }
            }
            residual += problem.driver ? problem.driver(t, x, v0) : 0.0;
            worst = std::max(worst, std::abs(residual));
        }
    }
    return worst;
}

BenchmarkProblem toy_problem() {
    BenchmarkProblem bench;
    bench.name = "toy";

    const double x_lo = kPi / 8.0, x_hi = 7.0 * kPi / 8.0;
    const double alpha = 0.5, T = 1.0;
    const double y_bar = std::cos(x_lo);

    auto mu = [](const double* x) { return 0.1 * (kPi / 2.0 - x[0]); };
    auto sigma = [x_lo, x_hi](const double* x) { return 0.2 * (x_hi - x[0]) * (x[0] - x_lo); };

    Problem& p = bench.problem;
    p.name = bench.name;
    p.dynamics = Dynamics::scalar(Box::interval(x_lo, x_hi), {kPi / 2.0}, mu, sigma, 0.002);
    p.terminal = [](const double* x) { return std::cos(x[0]); };
    p.bound = 1.0;
    p.horizon = T;
    p.initial_prior = [](double, const double* x) { return std::cos(x[0]); };

    // Square-root driver with a tangent extension beyond |y| = y_bar e^{-a(T-t)};
    // the extension keeps the fit smooth at every date on [-y_bar, y_bar].
    auto f_hat = [alpha, T, y_bar](double t, double y) {
        const double e = std::exp(-alpha * (T - t));
        const double y_cut = y_bar * e;
        if (std::abs(y) <= y_cut) return std::sqrt(e * e - y * y);
        const double s = std::sqrt(e * e - y_cut * y_cut);
        return s - (y_cut / s) * (std::abs(y) - y_cut);
    };
    p.driver = [mu, sigma, alpha, f_hat](double t, const double* x, double y) {
        const double s = sigma(x);
        return mu(x) * f_hat(t, y) + (-alpha + 0.5 * s * s) * y;
    };

    bench.reference.value = [alpha, T](double t, const double* x) {
        return std::exp(-alpha * (T - t)) * std::cos(x[0]);
    };
    bench.reference.residual = pde_residual(p, bench.reference.value);
    bench.reference.certified = bench.reference.residual <= 1e-6;

    bench.recipe = {-y_bar, y_bar, 20, 2, 0.05, 1000};

    SchemeConfig& cfg = bench.default_config;
    cfg.method = Method::A;
    cfg.n_steps = 20;
    cfg.mc_tol = 0.002;
    cfg.mc_cap = 10'000;
    cfg.euler_dt = 0.002;
    cfg.grid_step = 0.4;
    cfg.interp = InterpMode::MonotoneQuadratic;
    // The expectation is invariant in the sampling law; weighting the single
    // successor and shortening lifetimes cuts the branch-weight variance at
    // the boundary nodes by about a third against the uniform law.
    cfg.law = BranchingLaw({0.25, 0.6, 0.15}, 1.5);
    return bench;
}

namespace {

// Shared forward dynamics of the harder examples: U(1 - x) drift and
// V prod (2 - x_i) x_i scalar volatility on [0, 2]^d.
Dynamics hard_dynamics(int dim, double euler_dt) {
    const double U = 0.1, V = 0.2;
    Dynamics dyn;
    dyn.dim = dim;
    dyn.box = Box::cube(dim, 0.0, 2.0);
    dyn.x0 = Vec(dim, 1.0);
    dyn.euler_dt = euler_dt;
    dyn.drift = [U, dim](const double* x, double* out) {
        for (int a = 0; a < dim; ++a) out[a] = U * (1.0 - x[a]);
    };
    dyn.vol = [V, dim](const double* x, double* out) {
        double s = V;
        for (int a = 0; a < dim; ++a) s *= (2.0 - x[a]) * x[a];
        std::fill(out, out + dim * dim, 0.0);
        for (int a = 0; a < dim; ++a) out[a * dim + a] = s;
    };
    return dyn;
}

}  // namespace

BenchmarkProblem hard_problem_1(double C, double T) {
    if (!(C > 0.0)) throw std::invalid_argument("hard1: C must be > 0");
    BenchmarkProblem bench;
    bench.name = "hard1";
    const double U = 0.1, V = 0.2;

    Problem& p = bench.problem;
    p.name = bench.name;
    p.dynamics = hard_dynamics(1, 0.001);
    p.bound = 50.0;
    p.horizon = T;
    p.terminal = [C](const double* x) { return std::exp(C * x[0]); };
    p.initial_prior = [C](double, const double* x) { return std::exp(C * x[0]); };
    p.driver = [C, T, U, V](double t, const double*, double y) {
        const double ys = std::max(y, 1e-12);  // the log form lives on y > 0
        const double phi = std::log(ys) - 0.5 * (T - t);
        const double q = phi * (2.0 * C - phi);
        return y * (0.5 - (V * V / (2.0 * C * C)) * q * q - U * (C - phi));
    };

    bench.reference.value = [C, T](double t, const double* x) {
        return std::exp(C * x[0] + 0.5 * (T - t));
    };
    bench.reference.residual = pde_residual(p, bench.reference.value);
    bench.reference.certified = bench.reference.residual <= 1e-6;

    const double v_max = std::exp(2.0 * C + 0.5 * T);
    bench.recipe = {0.5, v_max + 1.0, 10, 3, 0.05, 1000};

    SchemeConfig& cfg = bench.default_config;
    cfg.method = Method::A;
    cfg.n_steps = 40;
    cfg.mc_tol = 0.002;
    cfg.mc_cap = 20'000;
    cfg.euler_dt = 0.001;
    cfg.grid_step = 0.2;
    cfg.interp = InterpMode::MonotoneQuadratic;
    cfg.law = BranchingLaw::uniform(3, 0.4);
    // The displayed truncation level 50 puts the explosion horizon far below
    // any practical step; runs mirror the source experiments and override.
    cfg.allow_horizon_override = true;
    return bench;
}

BenchmarkProblem hard_problem_2(int dim, double C, double c, double T) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("hard2: dim must be 1, 2 or 3");
    BenchmarkProblem bench;
    bench.name = "hard2-" + std::to_string(dim) + "d";
    const double U = 0.1, V = 0.2;

    Problem& p = bench.problem;
    p.name = bench.name;
    p.dynamics = hard_dynamics(dim, 0.001);
    p.bound = 50.0;
    p.horizon = T;

    auto mean_x = [dim](const double* x) {
        double s = 0.0;
        for (int a = 0; a < dim; ++a) s += x[a];
        return s / dim;
    };
    p.terminal = [C, mean_x](const double* x) { return std::exp(C * mean_x(x)); };
    p.initial_prior = [C, mean_x](double, const double* x) { return std::exp(C * mean_x(x)); };

    auto f1 = [](double y) { return 0.2 * (y + std::sin(0.5 * kPi * y)); };
    // Source terms as displayed: the one-dimensional variant carries C mu(x)
    // and a separate constant c in the exponentials; the multi-dimensional
    // one uses C mean(x) and the (1,1) volatility entry.
    std::function<double(double, const double*)> f2;
    if (dim == 1) {
        f2 = [C, c, T, U, V](double t, const double* x) {
            const double mu = U * (1.0 - x[0]);
            const double sig = V * (2.0 - x[0]) * x[0];
            const double grow = 0.5 * (T - t);
            return 0.5 - (0.2 + C * mu) - 0.5 * sig * sig * c * c * std::exp(C * x[0] + grow) -
                   0.2 * std::sin(0.5 * kPi * std::exp(c * x[0] + grow));
        };
    } else {
        f2 = [C, c, T, V, dim, mean_x](double t, const double* x) {
            double sig11 = V;
            for (int a = 0; a < dim; ++a) sig11 *= (2.0 - x[a]) * x[a];
            const double e = std::exp(C * mean_x(x) + 0.5 * (T - t));
            return 0.5 - (0.2 + C * mean_x(x)) - 0.5 * sig11 * sig11 * c * c / dim * e -
                   0.2 * std::sin(0.5 * kPi * e);
        };
    }
    p.driver = [f1, f2](double t, const double* x, double y) { return f1(y) + f2(t, x); };

    bench.reference.value = [C, T, mean_x](double t, const double* x) {
        return std::exp(C * mean_x(x) + 0.5 * (T - t));
    };
    bench.reference.residual = pde_residual(p, bench.reference.value, 9, dim == 1 ? 17 : 7);
    bench.reference.certified = bench.reference.residual <= 1e-6;

    const double v_max = std::exp(2.0 * C + 0.5 * T);
    bench.recipe = {0.5, v_max + 1.0, 10, 3, 0.05, 1};

    SchemeConfig& cfg = bench.default_config;
    cfg.method = Method::A;
    cfg.n_steps = (dim <= 2) ? 40 : 20;
    cfg.mc_tol = 0.002;
    cfg.mc_cap = (dim <= 2) ? 20'000 : 5'000;
    cfg.euler_dt = (dim <= 2) ? 0.001 : 0.01;
    cfg.grid_step = (dim <= 2) ? 0.2 : 0.4;
    cfg.interp = InterpMode::MonotoneQuadratic;
    cfg.law = BranchingLaw::uniform(3, 0.4);
    cfg.allow_horizon_override = true;
    return bench;
}

LocalPolynomialDriver BenchmarkProblem::make_driver(int n_pieces, int degree) const {
    const Problem& p = problem;
    const DriverRecipe& r = recipe;

    LocalPolynomialDriver d;
    if (name == "toy") {
        const double alpha = 0.5;
        const double x_lo = kPi / 8.0, x_hi = 7.0 * kPi / 8.0;
        const double y_bar = std::cos(x_lo);
        const double T = p.horizon;
        auto f_hat = [alpha, T, y_bar](double t, double y) {
            const double e = std::exp(-alpha * (T - t));
            const double y_cut = y_bar * e;
            if (std::abs(y) <= y_cut) return std::sqrt(e * e - y * y);
            const double s = std::sqrt(e * e - y_cut * y_cut);
            return s - (y_cut / s) * (std::abs(y) - y_cut);
        };
        LocalPolynomialDriver base =
            fit_time_sliced(f_hat, 0.0, T, r.time_slices, r.domain_lo, r.domain_hi, n_pieces,
                            degree, r.band_fraction);
        d = LocalPolynomialDriver(base.layout(), base.ell_max());
        LocalPolynomialDriver::Term scaled = base.terms().front();
        scaled.weight = [](double, const double* x) { return 0.1 * (kPi / 2.0 - x[0]); };
        d.add_term(std::move(scaled));
        d.add_monomial_term(1, [alpha, x_lo, x_hi](double, const double* x) {
            const double s = 0.2 * (x_hi - x[0]) * (x[0] - x_lo);
            return -alpha + 0.5 * s * s;
        });
        d.set_fit_residual(base.fit_residual());
    } else if (name == "hard1") {
        d = fit_time_sliced([&](double t, double y) { return p.driver(t, nullptr, y); }, 0.0,
                            p.horizon, r.time_slices, r.domain_lo, r.domain_hi, n_pieces, degree,
                            r.band_fraction);
    } else {  // hard2 family: exact split f1(y) + f2(t, x)
        auto f1 = [](double y) { return 0.2 * (y + std::sin(0.5 * kPi * y)); };
        Vec origin(p.dynamics.dim, 0.0);
        LocalPolynomialDriver base = fit_local_polynomial(
            [f1](const double*, double y) { return f1(y); }, r.domain_lo, r.domain_hi, n_pieces,
            degree, {origin}, r.band_fraction);
        d = LocalPolynomialDriver(base.layout(), base.ell_max());
        d.add_term(base.terms().front());
        const DriverFn f = p.driver;
        d.add_monomial_term(0, [f, f1](double t, const double* x) {
            return f(t, x, 1.0) - f1(1.0);  // recovers f2(t, x) exactly
        });
        d.set_fit_residual(base.fit_residual());
    }

    const int nx = p.dynamics.dim == 1 ? 65 : (p.dynamics.dim == 2 ? 9 : 5);
    d.extract_coeff_bound(box_sample(p.dynamics.box, nx), 0.0, p.horizon, 33);
    // Residual and diagonal slope of the assembled representation against
    // the true driver.
    const int nx_check = p.dynamics.dim == 1 ? 17 : 5;
    d.set_fit_residual(std::max(d.fit_residual(), representation_residual(p, d, 9, nx_check)));
    d.set_diagonal_lipschitz(diagonal_slope(p, d, 9, nx_check));
    return d;
}

LocalPolynomialDriver BenchmarkProblem::make_driver() const {
    return make_driver(recipe.n_pieces, recipe.degree);
}

std::vector<std::string> benchmark_names() {
    return {"toy", "hard1", "hard2-1d", "hard2-2d", "hard2-3d"};
}

BenchmarkProblem make_benchmark(const std::string& name, double C, double c, double T) {
    if (name == "toy") return toy_problem();
    if (name == "hard1") return hard_problem_1(C, T);
    if (name == "hard2" || name == "hard2-1d") return hard_problem_2(1, C, c, T);
    if (name == "hard2-2d") return hard_problem_2(2, C, c, T);
    if (name == "hard2-3d") return hard_problem_2(3, C, c, T);
    throw std::invalid_argument("unknown benchmark: " + name);
}

}  // namespace bsde
