#include "scheme.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "parallel.hpp"
#include "rng.hpp"

namespace bsde {

namespace {

double macro_step(const Problem& problem, const SchemeConfig& cfg) {
    if (cfg.n_steps < 1) throw std::invalid_argument("scheme: n_steps must be >= 1");
    return problem.horizon / cfg.n_steps;
}

void check_horizon_gate(const BoundsReport& bounds, double h, bool override_flag) {
    if (override_flag) return;
    if (h < bounds.horizon) return;
    std::ostringstream msg;
    msg << "scheme period h = " << h << " is not below the explosion horizon h_circ = "
        << bounds.horizon
        << "; refusing to run (pass the horizon override to force it)";
    throw HorizonGateError(msg.str());
}

Dynamics scheme_dynamics(const Problem& problem, const SchemeConfig& cfg) {
    Dynamics dyn = problem.dynamics;
    dyn.euler_dt = cfg.euler_dt;
    return dyn;
}

// Estimates one grid of values at date t with trees run to t_next. Every
// node owns a stream derived from (seed, i, j, node), so results do not
// depend on the worker count. Stored values are truncated at the problem
// bound.
void estimate_grid(const Problem& problem, const LocalPolynomialDriver& driver,
                   const SchemeConfig& cfg, const Dynamics& dyn, double t, double t_next,
                   const ValueGrid& terminal_grid, const PriorFn& prior, std::uint64_t i_index,
                   std::uint64_t j_index, ValueGrid& out, std::vector<McEstimate>& mc_out,
                   StepStats& stats) {
    const auto start = std::chrono::steady_clock::now();
    const long n = out.num_nodes();
    mc_out.assign(n, {});
    TerminalFn terminal = [&terminal_grid](const double* x) {
        return terminal_grid.interpolate(x);
    };
    McControls controls{cfg.mc_tol, cfg.mc_cap, cfg.mc_batch, cfg.node_cap};
    parallel_for(n, cfg.workers, [&](long node) {
        double coords[3];
        out.node_coords(node, coords);
        RandomStream rng = derive_stream(cfg.seed, stream_tag::kSchemeNode, i_index, j_index,
                                         static_cast<std::uint64_t>(node));
        const McEstimate est =
            mc_estimate(t, t_next, std::span<const double>(coords, dyn.dim), terminal, prior,
                        cfg.law, dyn, driver, controls, rng);
        mc_out[node] = est;
        out.set_node_value(node, truncate(est.mean, problem.bound));
    });
    stats.t = t;
    stats.points = n;
    for (const auto& est : mc_out) {
        stats.cap_hits += est.hit_cap ? 1 : 0;
        stats.mc_samples += est.n_samples;
    }
    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SchemeResult prepare_result(const Problem& problem, const LocalPolynomialDriver& driver,
                            const SchemeConfig& cfg) {
    SchemeResult result;
    result.bounds = compute_bounds_report(driver, problem.bound);
    check_horizon_gate(result.bounds, macro_step(problem, cfg), cfg.allow_horizon_override);

    const int n = cfg.n_steps;
    result.dates.resize(n + 1);
    for (int i = 0; i <= n; ++i)
        result.dates[i] = (i == n) ? problem.horizon : problem.horizon * i / n;
    result.grids.assign(n + 1, ValueGrid(problem.dynamics.box, cfg.grid_step, cfg.interp));
    result.node_mc.assign(n + 1, {});
    result.stats.assign(n, {});
    result.grids[n].set_from(problem.terminal);
    return result;
}

}  // namespace

SchemeResult run_method_a(const Problem& problem, const LocalPolynomialDriver& driver,
                          const SchemeConfig& cfg) {
    SchemeResult result = prepare_result(problem, driver, cfg);
    const Dynamics dyn = scheme_dynamics(problem, cfg);
    for (int i = cfg.n_steps - 1; i >= 0; --i) {
        const ValueGrid& next = result.grids[i + 1];
        PriorFn prior = [&next](double, const double* x) { return next.interpolate(x); };
        estimate_grid(problem, driver, cfg, dyn, result.dates[i], result.dates[i + 1], next,
                      prior, static_cast<std::uint64_t>(i), 0, result.grids[i], result.node_mc[i],
                      result.stats[i]);
    }
    return result;
}

SchemeResult run_method_b(const Problem& problem, const LocalPolynomialDriver& driver,
                          const SchemeConfig& cfg) {
    if (cfg.n_substeps < 1) throw std::invalid_argument("method B: n_substeps must be >= 1");
    SchemeResult result = prepare_result(problem, driver, cfg);
    const Dynamics dyn = scheme_dynamics(problem, cfg);
    const int n_sub = cfg.n_substeps;

    for (int i = cfg.n_steps - 1; i >= 0; --i) {
        const double t_i = result.dates[i];
        const double t_next = result.dates[i + 1];
        const double sub_h = (t_next - t_i) / n_sub;

        // sub[j] holds the estimate at t_i + j * sub_h; sub[n_sub] is the
        // macro terminal.
        std::vector<ValueGrid> sub(n_sub + 1, ValueGrid(problem.dynamics.box, cfg.grid_step,
                                                        cfg.interp));
        sub[n_sub] = result.grids[i + 1];
        std::vector<McEstimate> sub_mc;

        for (int j = n_sub - 1; j >= 0; --j) {
            const double t_hat = t_i + j * sub_h;
            // Prior read from the first sub-date at or after the branch time.
            PriorFn prior = [&sub, t_i, sub_h, j, n_sub](double t_abs, const double* x) {
                long jj = static_cast<long>(std::ceil((t_abs - t_i) / sub_h - 1e-12));
                jj = std::clamp<long>(jj, j + 1, n_sub);
                return sub[jj].interpolate(x);
            };
            StepStats sub_stats;
            estimate_grid(problem, driver, cfg, dyn, t_hat, t_next, result.grids[i + 1], prior,
                          static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j), sub[j],
                          sub_mc, sub_stats);
            result.stats[i].wall_seconds += sub_stats.wall_seconds;
            result.stats[i].cap_hits += sub_stats.cap_hits;
            result.stats[i].mc_samples += sub_stats.mc_samples;
            result.stats[i].points += sub_stats.points;
            if (j == 0) result.node_mc[i] = sub_mc;
        }
        result.stats[i].t = t_i;
        result.grids[i] = std::move(sub[0]);
    }
    return result;
}

std::vector<SchemeResult> run_picard(const Problem& problem, const LocalPolynomialDriver& driver,
                                     const SchemeConfig& cfg) {
    if (cfg.picard_iterations < 1)
        throw std::invalid_argument("picard: need at least one iteration");
    if (!problem.initial_prior)
        throw std::invalid_argument("picard: the problem has no initial prior");

    std::vector<SchemeResult> iterations;
    iterations.reserve(cfg.picard_iterations + 1);

    // Iteration 0 is the initial prior sampled on the grids.
    SchemeResult prior_result = prepare_result(problem, driver, cfg);
    for (int i = 0; i <= cfg.n_steps; ++i) {
        const double t = prior_result.dates[i];
        prior_result.grids[i].set_from(
            [&](const double* x) { return problem.initial_prior(t, x); });
    }
    iterations.push_back(std::move(prior_result));

    const Dynamics dyn = scheme_dynamics(problem, cfg);
    for (int m = 1; m <= cfg.picard_iterations; ++m) {
        SchemeResult result = prepare_result(problem, driver, cfg);
        const SchemeResult& prev = iterations.back();
        for (int i = cfg.n_steps - 1; i >= 0; --i) {
            const double t_i = result.dates[i];
            const double t_next = result.dates[i + 1];
            const ValueGrid& prev_lo = prev.grids[i];
            const ValueGrid& prev_hi = prev.grids[i + 1];
            // Linear time interpolation of the previous iterate.
            PriorFn prior = [&prev_lo, &prev_hi, t_i, t_next](double t_abs, const double* x) {
                const double u = std::clamp((t_abs - t_i) / (t_next - t_i), 0.0, 1.0);
                const double lo = prev_lo.interpolate(x);
                return lo + u * (prev_hi.interpolate(x) - lo);
            };
            estimate_grid(problem, driver, cfg, dyn, t_i, t_next, result.grids[i + 1], prior,
                          static_cast<std::uint64_t>(i), 0, result.grids[i], result.node_mc[i],
                          result.stats[i]);
        }
        iterations.push_back(std::move(result));
    }
    return iterations;
}

SchemeResult run_scheme(const Problem& problem, const LocalPolynomialDriver& driver,
                        const SchemeConfig& cfg) {
    switch (cfg.method) {
        case Method::A:
            return run_method_a(problem, driver, cfg);
        case Method::B:
            return run_method_b(problem, driver, cfg);
        case Method::Picard: {
            auto iterations = run_picard(problem, driver, cfg);
            return std::move(iterations.back());
        }
    }
    throw std::invalid_argument("scheme: unknown method");
}

}  // namespace bsde
