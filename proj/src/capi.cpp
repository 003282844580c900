#include "bsde/bsde.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "benchmarks.hpp"
#include "bounds.hpp"
#include "scheme.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
bsde_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const bsde::HorizonGateError& e) {
        set_error(e.what());
        return BSDE_ERR_HORIZON;
    } catch (const bsde::TreeOverflowError& e) {
        set_error(e.what());
        return BSDE_ERR_OVERFLOW;
    } catch (const std::ios_base::failure& e) {
        set_error(e.what());
        return BSDE_ERR_IO;
    } catch (const std::exception& e) {
        set_error(e.what());
        return BSDE_ERR_INVALID;
    } catch (...) {
        set_error("unknown error");
        return BSDE_ERR_INVALID;
    }
}

template <typename T, typename Fn>
T* guarded_create(Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    } catch (...) {
        set_error("unknown error");
        return nullptr;
    }
}

}  // namespace

struct bsde_problem {
    bsde::Problem problem;
    std::optional<bsde::BenchmarkProblem> bench;
    std::vector<double> default_probs;  // backs bsde_config_benchmark_defaults
};

struct bsde_driver {
    bsde::LocalPolynomialDriver driver;
};

struct bsde_result {
    bsde::SchemeResult result;
    std::vector<double> picard_deltas;
    std::string manifest;
};

extern "C" {

const char* bsde_version(void) { return "0.1.0"; }

const char* bsde_last_error(void) { return g_last_error.c_str(); }

/* ------------------------------------------------------------------ */

bsde_problem* bsde_problem_benchmark(const char* name, const char* params_json) {
    return guarded_create<bsde_problem>([&]() -> bsde_problem* {
        if (!name) throw std::invalid_argument("benchmark: name is null");
        double C = 0.5, c = 0.5, T = 1.0;
        if (params_json && std::strlen(params_json) > 0) {
            const auto j = nlohmann::json::parse(params_json);
            C = j.value("C", C);
            c = j.value("c", c);
            T = j.value("T", T);
        }
        auto* p = new bsde_problem;
        p->bench = bsde::make_benchmark(name, C, c, T);
        p->problem = p->bench->problem;
        return p;
    });
}

const char* bsde_benchmark_list(void) {
    static std::string joined = [] {
        std::string s;
        for (const auto& n : bsde::benchmark_names()) {
            if (!s.empty()) s += "\n";
            s += n;
        }
        return s;
    }();
    return joined.c_str();
}

bsde_problem* bsde_problem_custom(int dim, const double* box_lo, const double* box_hi,
                                  const double* x0, double horizon, double bound,
                                  bsde_drift_fn mu, bsde_vol_fn sigma, bsde_payoff_fn g,
                                  bsde_driver_eval_fn f, void* user) {
    return guarded_create<bsde_problem>([&]() -> bsde_problem* {
        if (dim < 1 || dim > bsde::kMaxDim) throw std::invalid_argument("custom: bad dimension");
        if (!box_lo || !box_hi || !x0) throw std::invalid_argument("custom: null box or start");
        if (!g) throw std::invalid_argument("custom: terminal payoff is required");
        if (!(bound > 0.0)) throw std::invalid_argument("custom: bound must be > 0");
        if (!(horizon > 0.0)) throw std::invalid_argument("custom: horizon must be > 0");

        auto* p = new bsde_problem;
        bsde::Problem& prob = p->problem;
        prob.dynamics.dim = dim;
        prob.dynamics.box = bsde::Box(bsde::Vec(box_lo, box_lo + dim),
                                      bsde::Vec(box_hi, box_hi + dim));
        prob.dynamics.x0 = bsde::Vec(x0, x0 + dim);
        if (mu) prob.dynamics.drift = [mu, user](const double* x, double* out) { mu(x, out, user); };
        if (sigma)
            prob.dynamics.vol = [sigma, user](const double* x, double* out) { sigma(x, out, user); };
        prob.terminal = [g, user](const double* x) { return g(x, user); };
        if (f) prob.driver = [f, user](double t, const double* x, double y) { return f(t, x, y, user); };
        prob.bound = bound;
        prob.horizon = horizon;
        prob.initial_prior = [g, user](double, const double* x) { return g(x, user); };
        prob.name = "custom";
        return p;
    });
}

int bsde_problem_dim(const bsde_problem* p) { return p ? p->problem.dynamics.dim : 0; }
double bsde_problem_horizon(const bsde_problem* p) { return p ? p->problem.horizon : 0.0; }
double bsde_problem_bound(const bsde_problem* p) { return p ? p->problem.bound : 0.0; }

int bsde_problem_has_reference(const bsde_problem* p) {
    return (p && p->bench && p->bench->reference.certified) ? 1 : 0;
}

double bsde_problem_reference_residual(const bsde_problem* p) {
    return (p && p->bench) ? p->bench->reference.residual : -1.0;
}

bsde_status bsde_problem_reference(const bsde_problem* p, double t, const double* x, double* out) {
    return guarded([&]() -> bsde_status {
        if (!p || !x || !out) throw std::invalid_argument("reference: null argument");
        if (!p->bench || !p->bench->reference.certified) {
            set_error("problem carries no certified reference");
            return BSDE_ERR_NO_REFERENCE;
        }
        *out = p->bench->reference.value(t, x);
        return BSDE_OK;
    });
}

void bsde_problem_free(bsde_problem* p) { delete p; }

/* ------------------------------------------------------------------ */

bsde_driver* bsde_driver_fit(const bsde_problem* p, int n_pieces, int degree) {
    return guarded_create<bsde_driver>([&]() -> bsde_driver* {
        if (!p) throw std::invalid_argument("driver fit: null problem");
        if (!p->bench)
            throw std::invalid_argument("driver fit: custom problems need bsde_driver_fit_window");
        const auto& bench = *p->bench;
        auto* d = new bsde_driver;
        d->driver = bench.make_driver(n_pieces > 0 ? n_pieces : bench.recipe.n_pieces,
                                      degree > 0 ? degree : bench.recipe.degree);
        return d;
    });
}

bsde_driver* bsde_driver_fit_window(const bsde_problem* p, double domain_lo, double domain_hi,
                                    int n_pieces, int degree, double band_fraction,
                                    int time_slices) {
    return guarded_create<bsde_driver>([&]() -> bsde_driver* {
        if (!p) throw std::invalid_argument("driver fit: null problem");
        if (!p->problem.driver) throw std::invalid_argument("driver fit: problem has no driver");
        auto* d = new bsde_driver;
        const auto f = p->problem.driver;
        const bsde::Vec x_ref = p->problem.dynamics.x0;
        if (time_slices <= 1) {
            d->driver = bsde::fit_local_polynomial(
                [f](const double* x, double y) { return f(0.0, x, y); }, domain_lo, domain_hi,
                n_pieces, degree, {x_ref}, band_fraction);
        } else {
            d->driver = bsde::fit_time_sliced(
                [f, x_ref](double t, double y) { return f(t, x_ref.data(), y); }, 0.0,
                p->problem.horizon, time_slices, domain_lo, domain_hi, n_pieces, degree,
                band_fraction);
        }
        return d;
    });
}

bsde_driver* bsde_driver_zero(int degree, double domain_lo, double domain_hi) {
    return guarded_create<bsde_driver>([&]() -> bsde_driver* {
        auto* d = new bsde_driver;
        d->driver = bsde::LocalPolynomialDriver::zero(std::max(2, degree), domain_lo, domain_hi);
        return d;
    });
}

bsde_driver* bsde_driver_load(const char* path) {
    return guarded_create<bsde_driver>([&]() -> bsde_driver* {
        if (!path) throw std::invalid_argument("driver load: null path");
        std::ifstream in(path);
        if (!in) throw std::ios_base::failure(std::string("cannot read ") + path);
        std::stringstream buf;
        buf << in.rdbuf();
        auto* d = new bsde_driver;
        d->driver = bsde::LocalPolynomialDriver::from_json(buf.str());
        return d;
    });
}

bsde_status bsde_driver_save(const bsde_driver* d, const char* path) {
    return guarded([&]() -> bsde_status {
        if (!d || !path) throw std::invalid_argument("driver save: null argument");
        std::ofstream out(path);
        if (!out) throw std::ios_base::failure(std::string("cannot write ") + path);
        out << d->driver.to_json() << "\n";
        if (!out) throw std::ios_base::failure(std::string("write failed: ") + path);
        return BSDE_OK;
    });
}

double bsde_driver_eval(const bsde_driver* d, double t, const double* x, double y,
                        double y_prior) {
    return d ? d->driver.eval(t, x, y, y_prior) : 0.0;
}

double bsde_driver_coeff_bound(const bsde_driver* d) { return d ? d->driver.coeff_bound() : 0.0; }
double bsde_driver_kernel_lipschitz(const bsde_driver* d) {
    return d ? d->driver.kernel_lipschitz() : 0.0;
}
double bsde_driver_fit_residual(const bsde_driver* d) { return d ? d->driver.fit_residual() : 0.0; }
int bsde_driver_degree(const bsde_driver* d) { return d ? d->driver.ell_max() : 0; }
int bsde_driver_pieces(const bsde_driver* d) { return d ? d->driver.n_pieces() : 0; }
void bsde_driver_free(bsde_driver* d) { delete d; }

/* ------------------------------------------------------------------ */

bsde_status bsde_explosion_horizon(double coeff_bound, int degree, double bound, double* out) {
    return guarded([&]() -> bsde_status {
        if (!out) throw std::invalid_argument("null output");
        *out = bsde::explosion_horizon(coeff_bound, degree, bound);
        return BSDE_OK;
    });
}

bsde_status bsde_growth_bound(double coeff_bound, int degree, double bound, double horizon,
                              double* out) {
    return guarded([&]() -> bsde_status {
        if (!out) throw std::invalid_argument("null output");
        *out = bsde::growth_bound(coeff_bound, degree, bound, horizon);
        return BSDE_OK;
    });
}

bsde_status bsde_ode_envelope(double coeff_bound, int degree, double bound, double t,
                              double* out) {
    return guarded([&]() -> bsde_status {
        if (!out) throw std::invalid_argument("null output");
        *out = bsde::solve_eta(coeff_bound, degree, bound, t);
        return BSDE_OK;
    });
}

bsde_status bsde_lipschitz_constants(const bsde_driver* d, double grown_bound, double* l1,
                                     double* l2) {
    return guarded([&]() -> bsde_status {
        if (!d || !l1 || !l2) throw std::invalid_argument("null argument");
        const auto [a, b] = bsde::lipschitz_constants(d->driver, grown_bound);
        *l1 = a;
        *l2 = b;
        return BSDE_OK;
    });
}

bsde_status bsde_moment_bounds(const bsde_driver* d, double bound, double rate, double h,
                               long n_trees, unsigned long long seed, double out[4]) {
    return guarded([&]() -> bsde_status {
        if (!d || !out) throw std::invalid_argument("null argument");
        const auto law = bsde::BranchingLaw::uniform(std::max(2, d->driver.ell_max()), rate);
        auto rng = bsde::derive_stream(seed, bsde::stream_tag::kMomentBound);
        const auto [m1, m2] = bsde::moment_bounds(law, d->driver, bound, h, n_trees, rng);
        out[0] = m1.mean;
        out[1] = m1.std_err;
        out[2] = m2.mean;
        out[3] = m2.std_err;
        return BSDE_OK;
    });
}

/* ------------------------------------------------------------------ */

void bsde_config_init(bsde_config* cfg) {
    if (!cfg) return;
    cfg->method = BSDE_METHOD_A;
    cfg->n_steps = 20;
    cfg->n_substeps = 1;
    cfg->picard_iterations = 3;
    cfg->mc_tolerance = 0.002;
    cfg->mc_cap = 10000;
    cfg->mc_batch = 256;
    cfg->euler_dt = 0.002;
    cfg->grid_step = 0.2;
    cfg->interpolation = BSDE_INTERP_MONOTONE_QUADRATIC;
    cfg->lifetime_rate = 0.4;
    cfg->offspring_probs = nullptr;
    cfg->n_offspring_probs = 0;
    cfg->seed = 1;
    cfg->workers = 0;
    cfg->allow_horizon_override = 0;
    cfg->node_cap = 1000000;
}

bsde_status bsde_config_benchmark_defaults(const bsde_problem* p, bsde_config* cfg) {
    return guarded([&]() -> bsde_status {
        if (!p || !cfg) throw std::invalid_argument("null argument");
        if (!p->bench) throw std::invalid_argument("custom problems carry no defaults");
        const bsde::SchemeConfig& d = p->bench->default_config;
        cfg->method = d.method == bsde::Method::A
                          ? BSDE_METHOD_A
                          : (d.method == bsde::Method::B ? BSDE_METHOD_B : BSDE_METHOD_PICARD);
        cfg->n_steps = d.n_steps;
        cfg->n_substeps = d.n_substeps;
        cfg->picard_iterations = d.picard_iterations;
        cfg->mc_tolerance = d.mc_tol;
        cfg->mc_cap = d.mc_cap;
        cfg->mc_batch = d.mc_batch;
        cfg->euler_dt = d.euler_dt;
        cfg->grid_step = d.grid_step;
        cfg->interpolation = d.interp == bsde::InterpMode::Linear
                                 ? BSDE_INTERP_LINEAR
                                 : BSDE_INTERP_MONOTONE_QUADRATIC;
        cfg->lifetime_rate = d.law.lifetime_rate;
        const_cast<bsde_problem*>(p)->default_probs = d.law.offspring_probs;
        cfg->offspring_probs = p->default_probs.data();
        cfg->n_offspring_probs = static_cast<int>(p->default_probs.size());
        cfg->seed = d.seed;
        cfg->workers = d.workers;
        cfg->allow_horizon_override = d.allow_horizon_override ? 1 : 0;
        cfg->node_cap = d.node_cap;
        return BSDE_OK;
    });
}

namespace {

bsde::SchemeConfig translate_config(const bsde_config& cfg, const bsde::LocalPolynomialDriver& d) {
    bsde::SchemeConfig out;
    switch (cfg.method) {
        case BSDE_METHOD_A: out.method = bsde::Method::A; break;
        case BSDE_METHOD_B: out.method = bsde::Method::B; break;
        case BSDE_METHOD_PICARD: out.method = bsde::Method::Picard; break;
        default: throw std::invalid_argument("config: unknown method");
    }
    out.n_steps = cfg.n_steps;
    out.n_substeps = cfg.n_substeps;
    out.picard_iterations = cfg.picard_iterations;
    out.mc_tol = cfg.mc_tolerance;
    out.mc_cap = cfg.mc_cap;
    out.mc_batch = cfg.mc_batch;
    out.euler_dt = cfg.euler_dt;
    out.grid_step = cfg.grid_step;
    out.interp = cfg.interpolation == BSDE_INTERP_LINEAR ? bsde::InterpMode::Linear
                                                         : bsde::InterpMode::MonotoneQuadratic;
    if (cfg.offspring_probs && cfg.n_offspring_probs > 0) {
        out.law = bsde::BranchingLaw(
            std::vector<double>(cfg.offspring_probs, cfg.offspring_probs + cfg.n_offspring_probs),
            cfg.lifetime_rate);
    } else {
        out.law = bsde::BranchingLaw::uniform(std::max(2, d.ell_max()), cfg.lifetime_rate);
    }
    out.seed = cfg.seed;
    out.workers = cfg.workers;
    out.allow_horizon_override = cfg.allow_horizon_override != 0;
    out.node_cap = cfg.node_cap;
    return out;
}

std::string build_manifest(const bsde::Problem& problem, const bsde::LocalPolynomialDriver& d,
                           const bsde::SchemeConfig& cfg, const bsde::SchemeResult& result) {
    nlohmann::json j;
    j["problem"] = {{"name", problem.name},
                    {"dim", problem.dynamics.dim},
                    {"horizon", problem.horizon},
                    {"bound", problem.bound}};
    j["driver"] = {{"pieces", d.n_pieces()},
                   {"degree", d.ell_max()},
                   {"domain", {d.domain_lo(), d.domain_hi()}},
                   {"coeff_bound", d.coeff_bound()},
                   {"kernel_lipschitz", d.kernel_lipschitz()},
                   {"fit_residual", d.fit_residual()},
                   {"diagonal_lipschitz", d.diagonal_lipschitz()}};
    j["config"] = {
        {"method",
         cfg.method == bsde::Method::A ? "A" : (cfg.method == bsde::Method::B ? "B" : "picard")},
        {"n_steps", cfg.n_steps},
        {"n_substeps", cfg.n_substeps},
        {"picard_iterations", cfg.picard_iterations},
        {"mc_tolerance", cfg.mc_tol},
        {"mc_cap", cfg.mc_cap},
        {"mc_batch", cfg.mc_batch},
        {"euler_dt", cfg.euler_dt},
        {"grid_step", cfg.grid_step},
        {"interpolation",
         cfg.interp == bsde::InterpMode::Linear ? "linear" : "monotone-quadratic"},
        {"lifetime_rate", cfg.law.lifetime_rate},
        {"offspring_probs", cfg.law.offspring_probs},
        {"seed", cfg.seed},
        {"workers", cfg.workers},
        {"allow_horizon_override", cfg.allow_horizon_override},
        {"node_cap", cfg.node_cap}};
    j["bounds"] = {{"coeff_bound", result.bounds.coeff_bound},
                   {"degree", result.bounds.degree},
                   {"bound", result.bounds.bound},
                   {"explosion_horizon", result.bounds.horizon},
                   {"growth_bound", result.bounds.growth}};
    auto& steps = j["steps"];
    steps = nlohmann::json::array();
    for (const auto& s : result.stats) {
        steps.push_back({{"t", s.t},
                         {"wall_seconds", s.wall_seconds},
                         {"cap_hits", s.cap_hits},
                         {"points", s.points},
                         {"mc_samples", s.mc_samples}});
    }
    return j.dump(2);
}

double sup_grid_distance(const bsde::SchemeResult& a, const bsde::SchemeResult& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.grids.size(); ++i) {
        const auto& va = a.grids[i].values();
        const auto& vb = b.grids[i].values();
        for (std::size_t k = 0; k < va.size(); ++k)
            worst = std::max(worst, std::abs(va[k] - vb[k]));
    }
    return worst;
}

}  // namespace

bsde_status bsde_solve(const bsde_problem* p, const bsde_driver* d, const bsde_config* cfg,
                       bsde_result** out) {
    return guarded([&]() -> bsde_status {
        if (!p || !d || !cfg || !out) throw std::invalid_argument("solve: null argument");
        const bsde::SchemeConfig scheme_cfg = translate_config(*cfg, d->driver);
        auto result = std::make_unique<bsde_result>();
        if (scheme_cfg.method == bsde::Method::Picard) {
            auto iterations = bsde::run_picard(p->problem, d->driver, scheme_cfg);
            for (std::size_t m = 1; m < iterations.size(); ++m)
                result->picard_deltas.push_back(
                    sup_grid_distance(iterations[m], iterations[m - 1]));
            result->result = std::move(iterations.back());
        } else {
            result->result = bsde::run_scheme(p->problem, d->driver, scheme_cfg);
        }
        result->manifest = build_manifest(p->problem, d->driver, scheme_cfg, result->result);
        *out = result.release();
        return BSDE_OK;
    });
}

int bsde_result_num_dates(const bsde_result* r) {
    return r ? static_cast<int>(r->result.dates.size()) : 0;
}

double bsde_result_date(const bsde_result* r, int i) {
    if (!r || i < 0 || i >= static_cast<int>(r->result.dates.size())) return 0.0;
    return r->result.dates[i];
}

long bsde_result_num_nodes(const bsde_result* r) {
    return r && !r->result.grids.empty() ? r->result.grids.front().num_nodes() : 0;
}

bsde_status bsde_result_node_coords(const bsde_result* r, long node, double* out) {
    return guarded([&]() -> bsde_status {
        if (!r || !out) throw std::invalid_argument("null argument");
        if (node < 0 || node >= bsde_result_num_nodes(r))
            throw std::invalid_argument("node index out of range");
        r->result.grids.front().node_coords(node, out);
        return BSDE_OK;
    });
}

bsde_status bsde_result_value(const bsde_result* r, int date, long node, double* out) {
    return guarded([&]() -> bsde_status {
        if (!r || !out) throw std::invalid_argument("null argument");
        if (date < 0 || date >= bsde_result_num_dates(r))
            throw std::invalid_argument("date index out of range");
        if (node < 0 || node >= bsde_result_num_nodes(r))
            throw std::invalid_argument("node index out of range");
        *out = r->result.grids[date].node_value(node);
        return BSDE_OK;
    });
}

bsde_status bsde_result_mc_info(const bsde_result* r, int date, long node, double* std_err,
                                long* n_samples, int* hit_cap) {
    return guarded([&]() -> bsde_status {
        if (!r) throw std::invalid_argument("null result");
        if (date < 0 || date >= bsde_result_num_dates(r))
            throw std::invalid_argument("date index out of range");
        if (node < 0 || node >= bsde_result_num_nodes(r))
            throw std::invalid_argument("node index out of range");
        bsde::McEstimate est;
        const auto& mc = r->result.node_mc[date];
        if (node < static_cast<long>(mc.size())) est = mc[node];
        if (std_err) *std_err = est.std_err;
        if (n_samples) *n_samples = est.n_samples;
        if (hit_cap) *hit_cap = est.hit_cap ? 1 : 0;
        return BSDE_OK;
    });
}

bsde_status bsde_result_eval(const bsde_result* r, int date, const double* x, double* out) {
    return guarded([&]() -> bsde_status {
        if (!r || !x || !out) throw std::invalid_argument("null argument");
        if (date < 0 || date >= bsde_result_num_dates(r))
            throw std::invalid_argument("date index out of range");
        *out = r->result.grids[date].interpolate(x);
        return BSDE_OK;
    });
}

double bsde_result_explosion_horizon(const bsde_result* r) {
    return r ? r->result.bounds.horizon : 0.0;
}

double bsde_result_growth_bound(const bsde_result* r) { return r ? r->result.bounds.growth : 0.0; }

long bsde_result_cap_hits(const bsde_result* r) {
    if (!r) return 0;
    long total = 0;
    for (const auto& s : r->result.stats) total += s.cap_hits;
    return total;
}

double bsde_result_wall_seconds(const bsde_result* r) {
    if (!r) return 0.0;
    double total = 0.0;
    for (const auto& s : r->result.stats) total += s.wall_seconds;
    return total;
}

const char* bsde_result_manifest(const bsde_result* r) { return r ? r->manifest.c_str() : ""; }

bsde_status bsde_result_grid_csv(const bsde_result* r, int date, const char* path) {
    return guarded([&]() -> bsde_status {
        if (!r || !path) throw std::invalid_argument("null argument");
        if (date < 0 || date >= bsde_result_num_dates(r))
            throw std::invalid_argument("date index out of range");
        std::ofstream out(path);
        if (!out) throw std::ios_base::failure(std::string("cannot write ") + path);
        r->result.grids[date].write_csv(out);
        if (!out) throw std::ios_base::failure(std::string("write failed: ") + path);
        return BSDE_OK;
    });
}

int bsde_result_picard_deltas(const bsde_result* r, double* out, int cap) {
    if (!r || !out || cap <= 0) return 0;
    const int n = std::min<int>(cap, static_cast<int>(r->picard_deltas.size()));
    for (int i = 0; i < n; ++i) out[i] = r->picard_deltas[i];
    return n;
}

void bsde_result_free(bsde_result* r) { delete r; }

bsde_status bsde_sample_tree(const bsde_problem* p, const bsde_driver* d, const bsde_config* cfg,
                             double horizon, unsigned long long seed, const char* path) {
    return guarded([&]() -> bsde_status {
        if (!p || !d || !cfg || !path) throw std::invalid_argument("null argument");
        const bsde::SchemeConfig scheme_cfg = translate_config(*cfg, d->driver);
        bsde::Dynamics dyn = p->problem.dynamics;
        dyn.euler_dt = scheme_cfg.euler_dt;
        auto rng = bsde::derive_stream(seed, bsde::stream_tag::kUser);
        bsde::TreeSimOptions opts;
        opts.node_cap = scheme_cfg.node_cap;
        opts.record_paths = true;
        const auto tree = bsde::simulate_tree(scheme_cfg.law, dyn, dyn.x0, horizon, rng, opts);
        std::ofstream out(path);
        if (!out) throw std::ios_base::failure(std::string("cannot write ") + path);
        tree.dump(out);
        if (!out) throw std::ios_base::failure(std::string("write failed: ") + path);
        return BSDE_OK;
    });
}

} /* extern "C" */
