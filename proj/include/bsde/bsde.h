/*
 * C interface of the branching-diffusion BSDE solver.
 *
 * The library estimates the Y-component of Markovian BSDEs (equivalently,
 * mild solutions of semilinear parabolic PDEs) by simulating marked branching
 * diffusions whose offspring weights encode a local-polynomial approximation
 * of the driver. All state lives behind opaque handles; every fallible call
 * returns a bsde_status and leaves a diagnostic in bsde_last_error().
 *
 * Handles are not thread-safe individually, but distinct handles may be used
 * from distinct threads. Solves parallelize internally over grid points.
 */
#ifndef BSDE_H
#define BSDE_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define BSDE_API __declspec(dllexport)
#else
#define BSDE_API __attribute__((visibility("default")))
#endif

typedef enum bsde_status {
    BSDE_OK = 0,
    BSDE_ERR_INVALID = 1,     /* bad argument or malformed input */
    BSDE_ERR_HORIZON = 2,     /* scheme period not below the explosion horizon */
    BSDE_ERR_OVERFLOW = 3,    /* particle tree exceeded its node cap */
    BSDE_ERR_IO = 4,          /* file could not be read or written */
    BSDE_ERR_NO_REFERENCE = 5 /* benchmark carries no certified reference */
} bsde_status;

BSDE_API const char* bsde_version(void);
/* Thread-local message describing the most recent failure. */
BSDE_API const char* bsde_last_error(void);

/* ------------------------------------------------------------------ */
/* Problems                                                            */

typedef struct bsde_problem bsde_problem;

/* Benchmarks: "toy", "hard1", "hard2-1d", "hard2-2d", "hard2-3d".
 * params_json may be NULL or a JSON object with optional keys
 * "C", "c", "T" (doubles). */
BSDE_API bsde_problem* bsde_problem_benchmark(const char* name, const char* params_json);
/* Newline-separated benchmark names; storage owned by the library. */
BSDE_API const char* bsde_benchmark_list(void);

typedef void (*bsde_drift_fn)(const double* x, double* out, void* user);
/* out is a row-major dim x dim matrix. */
typedef void (*bsde_vol_fn)(const double* x, double* out, void* user);
typedef double (*bsde_payoff_fn)(const double* x, void* user);
typedef double (*bsde_driver_eval_fn)(double t, const double* x, double y, void* user);

/* Custom problem from C callbacks. mu/sigma may be NULL (zero coefficient),
 * f may be NULL (driver-free transport). The initial prior defaults to the
 * terminal payoff held constant in time. */
BSDE_API bsde_problem* bsde_problem_custom(int dim, const double* box_lo, const double* box_hi,
                                           const double* x0, double horizon, double bound,
                                           bsde_drift_fn mu, bsde_vol_fn sigma, bsde_payoff_fn g,
                                           bsde_driver_eval_fn f, void* user);

BSDE_API int bsde_problem_dim(const bsde_problem* p);
BSDE_API double bsde_problem_horizon(const bsde_problem* p);
BSDE_API double bsde_problem_bound(const bsde_problem* p);
/* 1 if a certified closed-form reference exists. */
BSDE_API int bsde_problem_has_reference(const bsde_problem* p);
/* Residual of the candidate reference under the PDE oracle (benchmarks). */
BSDE_API double bsde_problem_reference_residual(const bsde_problem* p);
BSDE_API bsde_status bsde_problem_reference(const bsde_problem* p, double t, const double* x,
                                            double* out);
BSDE_API void bsde_problem_free(bsde_problem* p);

/* ------------------------------------------------------------------ */
/* Drivers                                                             */

typedef struct bsde_driver bsde_driver;

/* Localize a benchmark problem's driver with its recipe; n_pieces or degree
 * <= 0 pick the recipe defaults. Fails for custom problems without an
 * attached driver. */
BSDE_API bsde_driver* bsde_driver_fit(const bsde_problem* p, int n_pieces, int degree);
/* Least-squares fit of the problem's driver f(t, x, y) on [domain_lo,
 * domain_hi] at the problem's initial point, with time_slices >= 1 slices
 * over [0, T]. */
BSDE_API bsde_driver* bsde_driver_fit_window(const bsde_problem* p, double domain_lo,
                                             double domain_hi, int n_pieces, int degree,
                                             double band_fraction, int time_slices);
BSDE_API bsde_driver* bsde_driver_zero(int degree, double domain_lo, double domain_hi);
BSDE_API bsde_driver* bsde_driver_load(const char* path);
/* Self-describing text format (knots, coefficients, kernel band). Drivers
 * carrying coefficient callbacks cannot be saved. */
BSDE_API bsde_status bsde_driver_save(const bsde_driver* d, const char* path);

BSDE_API double bsde_driver_eval(const bsde_driver* d, double t, const double* x, double y,
                                 double y_prior);
BSDE_API double bsde_driver_coeff_bound(const bsde_driver* d);
BSDE_API double bsde_driver_kernel_lipschitz(const bsde_driver* d);
BSDE_API double bsde_driver_fit_residual(const bsde_driver* d);
BSDE_API int bsde_driver_degree(const bsde_driver* d);
BSDE_API int bsde_driver_pieces(const bsde_driver* d);
BSDE_API void bsde_driver_free(bsde_driver* d);

/* ------------------------------------------------------------------ */
/* A-priori bounds                                                     */

/* Well-posedness window of the comparison ODE; degree >= 2, C > 0, M > 0. */
BSDE_API bsde_status bsde_explosion_horizon(double coeff_bound, int degree, double bound,
                                            double* out);
/* Growth level over [0, horizon]; fails when the horizon is too large. */
BSDE_API bsde_status bsde_growth_bound(double coeff_bound, int degree, double bound,
                                       double horizon, double* out);
/* Comparison ODE value at t (fourth-order integration). */
BSDE_API bsde_status bsde_ode_envelope(double coeff_bound, int degree, double bound, double t,
                                       double* out);
/* Lipschitz constants (L1, L2) of the localized driver at growth level
 * grown_bound >= 1. */
BSDE_API bsde_status bsde_lipschitz_constants(const bsde_driver* d, double grown_bound,
                                              double* l1, double* l2);
/* Monte Carlo moment constants at t = h over n_trees trees:
 * out = {m1, se1, m2, se2}. */
BSDE_API bsde_status bsde_moment_bounds(const bsde_driver* d, double bound, double rate,
                                        double h, long n_trees, unsigned long long seed,
                                        double out[4]);

/* ------------------------------------------------------------------ */
/* Scheme configuration and solve                                      */

typedef enum bsde_method { BSDE_METHOD_A = 0, BSDE_METHOD_B = 1, BSDE_METHOD_PICARD = 2 } bsde_method;
typedef enum bsde_interp { BSDE_INTERP_LINEAR = 0, BSDE_INTERP_MONOTONE_QUADRATIC = 1 } bsde_interp;

typedef struct bsde_config {
    int method;               /* bsde_method */
    int n_steps;              /* macro time steps */
    int n_substeps;           /* method B sub-grid, >= 1 */
    int picard_iterations;    /* Picard only, >= 1 */
    double mc_tolerance;      /* target standard error per grid point */
    long mc_cap;              /* sample cap per grid point */
    long mc_batch;            /* batch between stopping checks */
    double euler_dt;
    double grid_step;
    int interpolation;        /* bsde_interp */
    double lifetime_rate;     /* exponential lifetime parameter */
    const double* offspring_probs; /* NULL: uniform over 0..driver degree */
    int n_offspring_probs;
    unsigned long long seed;
    int workers;              /* 0: hardware concurrency */
    int allow_horizon_override;
    long node_cap;            /* per-tree particle cap */
} bsde_config;

BSDE_API void bsde_config_init(bsde_config* cfg);
/* Benchmark problems carry tuned defaults (steps, tolerances, law, grid);
 * fills cfg with them. offspring_probs points into storage owned by the
 * problem handle. Fails for custom problems. */
BSDE_API bsde_status bsde_config_benchmark_defaults(const bsde_problem* p, bsde_config* cfg);

typedef struct bsde_result bsde_result;

BSDE_API bsde_status bsde_solve(const bsde_problem* p, const bsde_driver* d,
                                const bsde_config* cfg, bsde_result** out);

BSDE_API int bsde_result_num_dates(const bsde_result* r);
BSDE_API double bsde_result_date(const bsde_result* r, int i);
BSDE_API long bsde_result_num_nodes(const bsde_result* r);
/* Coordinates of one grid node (dim doubles). */
BSDE_API bsde_status bsde_result_node_coords(const bsde_result* r, long node, double* out);
/* Stored value at a date/node. */
BSDE_API bsde_status bsde_result_value(const bsde_result* r, int date, long node, double* out);
/* Monte Carlo diagnostics at a date/node (zeros at the terminal date). */
BSDE_API bsde_status bsde_result_mc_info(const bsde_result* r, int date, long node,
                                         double* std_err, long* n_samples, int* hit_cap);
/* Interpolated value at x for a date. */
BSDE_API bsde_status bsde_result_eval(const bsde_result* r, int date, const double* x,
                                      double* out);
/* Explosion horizon / growth level attached to the run. */
BSDE_API double bsde_result_explosion_horizon(const bsde_result* r);
BSDE_API double bsde_result_growth_bound(const bsde_result* r);
/* Total cap-hit count and wall time of the backward sweep. */
BSDE_API long bsde_result_cap_hits(const bsde_result* r);
BSDE_API double bsde_result_wall_seconds(const bsde_result* r);
/* Run manifest (config echo, bounds report, per-step statistics) as JSON;
 * storage owned by the result. */
BSDE_API const char* bsde_result_manifest(const bsde_result* r);
/* Grid CSV (one row per node: coordinates, value) for one date. */
BSDE_API bsde_status bsde_result_grid_csv(const bsde_result* r, int date, const char* path);
/* Sup distances between successive Picard iterates (Picard runs only);
 * returns the number of entries written, at most cap. */
BSDE_API int bsde_result_picard_deltas(const bsde_result* r, double* out, int cap);
BSDE_API void bsde_result_free(bsde_result* r);

/* One simulated particle tree dumped as text (one node per line: label,
 * birth, death, offspring count, positions) for debugging and plotting. */
BSDE_API bsde_status bsde_sample_tree(const bsde_problem* p, const bsde_driver* d,
                                      const bsde_config* cfg, double horizon,
                                      unsigned long long seed, const char* path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BSDE_H */
