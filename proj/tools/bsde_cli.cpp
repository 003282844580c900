// Command-line front end over the shared-library C API. Configuration comes
// from a single JSON file; outputs are a run manifest, per-date grid CSVs,
// and an error table against the configured reference.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <bsde/bsde.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ProblemHandle {
    bsde_problem* p = nullptr;
    ~ProblemHandle() { bsde_problem_free(p); }
};
struct DriverHandle {
    bsde_driver* d = nullptr;
    ~DriverHandle() { bsde_driver_free(d); }
};
struct ResultHandle {
    bsde_result* r = nullptr;
    ~ResultHandle() { bsde_result_free(r); }
};

int status_exit_code(bsde_status s) {
    switch (s) {
        case BSDE_OK: return 0;
        case BSDE_ERR_HORIZON: return 2;
        case BSDE_ERR_OVERFLOW: return 3;
        case BSDE_ERR_IO: return 4;
        default: return 1;
    }
}

[[noreturn]] void fail(bsde_status s, const std::string& context) {
    std::cerr << "error: " << context << ": " << bsde_last_error() << "\n";
    std::exit(status_exit_code(s));
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot read config file " << path << "\n";
        std::exit(1);
    }
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        std::cerr << "error: malformed config " << path << ": " << e.what() << "\n";
        std::exit(1);
    }
}

bsde_problem* open_problem(const json& cfg) {
    const std::string name = cfg.value("benchmark", "");
    if (name.empty()) {
        std::cerr << "error: config needs a \"benchmark\" name (see `list`)\n";
        std::exit(1);
    }
    std::string params = "{}";
    if (cfg.contains("params")) params = cfg["params"].dump();
    bsde_problem* p = bsde_problem_benchmark(name.c_str(), params.c_str());
    if (!p) fail(BSDE_ERR_INVALID, "benchmark \"" + name + "\"");
    return p;
}

bsde_driver* open_driver(const json& cfg, const bsde_problem* p) {
    const json d = cfg.value("driver", json::object());
    if (d.contains("load")) {
        bsde_driver* h = bsde_driver_load(d["load"].get<std::string>().c_str());
        if (!h) fail(BSDE_ERR_IO, "driver load");
        return h;
    }
    const int pieces = d.value("pieces", 0);
    const int degree = d.value("degree", 0);
    if (d.contains("window")) {
        const auto& w = d["window"];
        bsde_driver* h = bsde_driver_fit_window(
            p, w.at("lo").get<double>(), w.at("hi").get<double>(), pieces > 0 ? pieces : 20,
            degree > 0 ? degree : 2, d.value("band_fraction", 0.05), d.value("time_slices", 1));
        if (!h) fail(BSDE_ERR_INVALID, "driver window fit");
        return h;
    }
    bsde_driver* h = bsde_driver_fit(p, pieces, degree);
    if (!h) fail(BSDE_ERR_INVALID, "driver fit");
    return h;
}

struct SchemeOverrides {
    std::optional<unsigned long long> seed;
    std::optional<int> workers;
    bool allow_horizon_override = false;
    std::optional<int> n_steps;
};

std::vector<double> g_offspring_storage;

// Starts from the benchmark's own defaults, then lets the config override
// field by field.
bsde_config benchmark_defaults(const bsde_problem* p) {
    bsde_config out;
    bsde_config_init(&out);
    if (bsde_config_benchmark_defaults(p, &out) == BSDE_OK && out.n_offspring_probs > 0) {
        g_offspring_storage.assign(out.offspring_probs,
                                   out.offspring_probs + out.n_offspring_probs);
        out.offspring_probs = g_offspring_storage.data();
    }
    return out;
}

bsde_config scheme_config(const json& cfg, const bsde_problem* p, const SchemeOverrides& over) {
    bsde_config out = benchmark_defaults(p);
    const json s = cfg.value("scheme", json::object());
    const std::string method = s.value("method", "A");
    if (method == "A" || method == "a") out.method = BSDE_METHOD_A;
    else if (method == "B" || method == "b") out.method = BSDE_METHOD_B;
    else if (method == "picard" || method == "Picard") out.method = BSDE_METHOD_PICARD;
    else {
        std::cerr << "error: unknown scheme.method \"" << method << "\"\n";
        std::exit(1);
    }
    out.n_steps = s.value("n_steps", out.n_steps);
    out.n_substeps = s.value("n_substeps", out.n_substeps);
    out.picard_iterations = s.value("picard_iterations", out.picard_iterations);
    out.mc_tolerance = s.value("mc_tolerance", out.mc_tolerance);
    out.mc_cap = s.value("mc_cap", out.mc_cap);
    out.mc_batch = s.value("mc_batch", out.mc_batch);
    out.euler_dt = s.value("euler_dt", out.euler_dt);
    out.grid_step = s.value("grid_step", out.grid_step);
    const std::string interp = s.value("interpolation", "monotone-quadratic");
    if (interp == "linear") out.interpolation = BSDE_INTERP_LINEAR;
    else if (interp == "monotone-quadratic") out.interpolation = BSDE_INTERP_MONOTONE_QUADRATIC;
    else {
        std::cerr << "error: unknown scheme.interpolation \"" << interp << "\"\n";
        std::exit(1);
    }
    out.lifetime_rate = s.value("lifetime_rate", out.lifetime_rate);
    if (s.contains("offspring_probs")) {
        g_offspring_storage = s["offspring_probs"].get<std::vector<double>>();
        out.offspring_probs = g_offspring_storage.data();
        out.n_offspring_probs = static_cast<int>(g_offspring_storage.size());
    }
    out.seed = s.value("seed", out.seed);
    out.workers = s.value("workers", out.workers);
    if (s.contains("allow_horizon_override"))
        out.allow_horizon_override = s["allow_horizon_override"].get<bool>() ? 1 : 0;
    out.node_cap = s.value("node_cap", out.node_cap);

    if (over.seed) out.seed = *over.seed;
    if (over.workers) out.workers = *over.workers;
    if (over.allow_horizon_override) out.allow_horizon_override = 1;
    if (over.n_steps) out.n_steps = *over.n_steps;
    return out;
}

enum class ReferenceMode { Auto, ClosedForm, Self, None };

ReferenceMode reference_mode(const json& cfg) {
    const std::string mode = cfg.value("reference", "auto");
    if (mode == "auto") return ReferenceMode::Auto;
    if (mode == "closed-form") return ReferenceMode::ClosedForm;
    if (mode == "self") return ReferenceMode::Self;
    if (mode == "none") return ReferenceMode::None;
    std::cerr << "error: unknown reference mode \"" << mode << "\"\n";
    std::exit(1);
}

struct ErrorSummary {
    bool has_reference = false;
    double max_abs = 0.0;
    double mean_abs = 0.0;
};

// Error table at the first date: node, coordinates, estimate, reference,
// absolute and percentage error, standard error, cap flag.
ErrorSummary write_error_table(const bsde_problem* p, const bsde_result* r,
                               const bsde_result* self_ref, ReferenceMode mode,
                               const fs::path& path) {
    ErrorSummary summary;
    const bool closed = bsde_problem_has_reference(p) != 0 &&
                        (mode == ReferenceMode::Auto || mode == ReferenceMode::ClosedForm);
    const bool self = self_ref != nullptr;
    if (mode == ReferenceMode::ClosedForm && !bsde_problem_has_reference(p)) {
        std::cerr << "error: reference \"closed-form\" requested but the benchmark has no "
                     "certified closed form (candidate residual "
                  << bsde_problem_reference_residual(p) << "); use \"self\" or \"none\"\n";
        std::exit(1);
    }
    if (!closed && !self) return summary;

    std::ofstream out(path);
    out << std::setprecision(17);
    const int dim = bsde_problem_dim(p);
    out << "node,";
    for (int a = 0; a < dim; ++a) out << "x" << a + 1 << ",";
    out << "estimate,reference,abs_error,pct_error,std_err,hit_cap\n";

    const long nodes = bsde_result_num_nodes(r);
    const double t0 = bsde_result_date(r, 0);
    double sum = 0.0;
    for (long k = 0; k < nodes; ++k) {
        double coords[3], value = 0.0, ref = 0.0, se = 0.0;
        long n = 0;
        int cap = 0;
        bsde_result_node_coords(r, k, coords);
        bsde_result_value(r, 0, k, &value);
        bsde_result_mc_info(r, 0, k, &se, &n, &cap);
        if (closed) {
            bsde_problem_reference(p, t0, coords, &ref);
        } else {
            bsde_result_eval(self_ref, 0, coords, &ref);
        }
        const double abs_err = std::abs(value - ref);
        const double pct = ref != 0.0 ? 100.0 * abs_err / std::abs(ref) : 0.0;
        out << k << ",";
        for (int a = 0; a < dim; ++a) out << coords[a] << ",";
        out << value << "," << ref << "," << abs_err << "," << pct << "," << se << "," << cap
            << "\n";
        summary.max_abs = std::max(summary.max_abs, abs_err);
        sum += abs_err;
    }
    summary.mean_abs = nodes > 0 ? sum / nodes : 0.0;
    summary.has_reference = true;
    return summary;
}

struct RunOutput {
    ErrorSummary errors;
    double wall_seconds = 0.0;
    long cap_hits = 0;
};

RunOutput run_once(const json& cfg, const bsde_problem* p, const bsde_driver* d,
                   const bsde_config& scheme, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    bsde_result* raw = nullptr;
    const bsde_status status = bsde_solve(p, d, &scheme, &raw);
    if (status != BSDE_OK) fail(status, "solve");
    ResultHandle result{raw};

    const json output = cfg.value("output", json::object());
    const bool want_grids = output.value("grids", true);
    const bool want_errors = output.value("error_table", true);

    if (want_grids) {
        for (int i = 0; i < bsde_result_num_dates(result.r); ++i) {
            const fs::path grid_path = out_dir / ("grid_t" + std::to_string(i) + ".csv");
            if (bsde_result_grid_csv(result.r, i, grid_path.string().c_str()) != BSDE_OK)
                fail(BSDE_ERR_IO, "grid csv");
        }
    }

    // Optional self-convergence reference: a refined run of the same method.
    const ReferenceMode mode = reference_mode(cfg);
    ResultHandle self_ref;
    if (mode == ReferenceMode::Self) {
        const json sr = cfg.value("self_reference", json::object());
        bsde_config refined = scheme;
        refined.n_steps *= sr.value("refine_steps", 2);
        refined.mc_tolerance /= sr.value("refine_tolerance", 2.0);
        refined.mc_cap *= sr.value("refine_cap", 4);
        refined.seed = scheme.seed + 1;
        bsde_result* ref_raw = nullptr;
        const bsde_status ref_status = bsde_solve(p, d, &refined, &ref_raw);
        if (ref_status != BSDE_OK) fail(ref_status, "self-reference solve");
        self_ref.r = ref_raw;
    }

    RunOutput out;
    if (want_errors && mode != ReferenceMode::None) {
        out.errors = write_error_table(p, result.r, self_ref.r, mode,
                                       out_dir / "error_table.csv");
    }
    out.wall_seconds = bsde_result_wall_seconds(result.r);
    out.cap_hits = bsde_result_cap_hits(result.r);

    // Manifest: solver report plus the run-level context.
    json manifest = json::parse(bsde_result_manifest(result.r));
    manifest["run"] = {
        {"benchmark", cfg.value("benchmark", "")},
        {"reference",
         mode == ReferenceMode::Self ? "self"
                                     : (out.errors.has_reference ? "closed-form" : "none")},
        {"driver_fit_residual", bsde_driver_fit_residual(d)},
        {"candidate_reference_residual", bsde_problem_reference_residual(p)},
    };
    if (out.errors.has_reference) {
        manifest["run"]["max_abs_error"] = out.errors.max_abs;
        manifest["run"]["mean_abs_error"] = out.errors.mean_abs;
    }
    std::ofstream mout(out_dir / "manifest.json");
    mout << manifest.dump(2) << "\n";
    return out;
}

fs::path resolve_out_dir(const std::string& flag_value, const json& cfg) {
    if (!flag_value.empty()) return flag_value;
    if (cfg.contains("output") && cfg["output"].contains("dir"))
        return cfg["output"]["dir"].get<std::string>();
    const char* root = std::getenv("BSDE_OUTPUT_ROOT");
    return fs::path(root ? root : "out");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Branching-diffusion Monte Carlo solver for semilinear parabolic PDEs / "
                 "Markovian BSDEs"};
    app.require_subcommand(1);

    constexpr unsigned long long kNoSeed = ~0ULL;
    std::string config_path, out_flag, tree_out, fit_out;
    SchemeOverrides over;
    unsigned long long seed_flag = kNoSeed;
    int workers_flag = -1;
    double tree_horizon = 1.0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "JSON config file")->required();
        cmd->add_option("--seed", seed_flag, "override scheme.seed");
        cmd->add_option("--workers", workers_flag, "override scheme.workers");
        cmd->add_flag("--allow-horizon-override", over.allow_horizon_override,
                      "force runs whose period is not below the explosion horizon");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "solve a benchmark and write artifacts");
    add_common(run_cmd);
    run_cmd->add_option("-o,--out", out_flag, "output directory (default $BSDE_OUTPUT_ROOT or ./out)");

    CLI::App* list_cmd = app.add_subcommand("list", "list available benchmarks");

    CLI::App* tree_cmd = app.add_subcommand("tree", "dump one sampled particle tree");
    add_common(tree_cmd);
    tree_cmd->add_option("-o,--out", tree_out, "output text file")->required();
    tree_cmd->add_option("--horizon", tree_horizon, "tree horizon (default 1.0)");

    CLI::App* fit_cmd = app.add_subcommand("fit", "fit a driver window and save it");
    add_common(fit_cmd);
    fit_cmd->add_option("-o,--out", fit_out, "output driver file")->required();

    CLI11_PARSE(app, argc, argv);

    if (list_cmd->parsed()) {
        std::cout << bsde_benchmark_list() << "\n";
        return 0;
    }

    const json cfg = load_config(config_path);
    if (seed_flag != kNoSeed) over.seed = seed_flag;
    if (workers_flag >= 0) over.workers = workers_flag;

    ProblemHandle problem{open_problem(cfg)};
    DriverHandle driver{open_driver(cfg, problem.p)};

    if (tree_cmd->parsed()) {
        bsde_config scheme = scheme_config(cfg, problem.p, over);
        const bsde_status s = bsde_sample_tree(problem.p, driver.d, &scheme, tree_horizon,
                                               scheme.seed, tree_out.c_str());
        if (s != BSDE_OK) fail(s, "tree dump");
        std::cout << "tree written to " << tree_out << "\n";
        return 0;
    }

    if (fit_cmd->parsed()) {
        const bsde_status s = bsde_driver_save(driver.d, fit_out.c_str());
        if (s != BSDE_OK) fail(s, "driver save (assembled benchmark drivers carry coefficient "
                                  "callbacks; use a driver.window fit)");
        std::cout << "driver written to " << fit_out << " (pieces=" << bsde_driver_pieces(driver.d)
                  << " degree=" << bsde_driver_degree(driver.d)
                  << " coeff_bound=" << bsde_driver_coeff_bound(driver.d)
                  << " kernel_lipschitz=" << bsde_driver_kernel_lipschitz(driver.d)
                  << " fit_residual=" << bsde_driver_fit_residual(driver.d) << ")\n";
        return 0;
    }

    // run
    const fs::path out_root = resolve_out_dir(out_flag, cfg);
    bsde_config scheme = scheme_config(cfg, problem.p, over);

    std::vector<int> sweep_steps;
    if (cfg.contains("sweep") && cfg["sweep"].contains("n_steps"))
        sweep_steps = cfg["sweep"]["n_steps"].get<std::vector<int>>();

    if (sweep_steps.empty()) {
        const RunOutput out = run_once(cfg, problem.p, driver.d, scheme, out_root);
        std::cout << "summary: benchmark=" << cfg.value("benchmark", "")
                  << " n_steps=" << scheme.n_steps;
        if (out.errors.has_reference)
            std::cout << " max_abs_error=" << out.errors.max_abs
                      << " mean_abs_error=" << out.errors.mean_abs;
        std::cout << " cap_hits=" << out.cap_hits << " wall_s=" << out.wall_seconds << "\n";
        return 0;
    }

    fs::create_directories(out_root);
    std::ofstream summary(out_root / "sweep_summary.csv");
    summary << std::setprecision(17) << "n_steps,max_abs_error,mean_abs_error,cap_hits,wall_s\n";
    for (int n : sweep_steps) {
        bsde_config step_cfg = scheme;
        step_cfg.n_steps = n;
        const fs::path dir = out_root / ("n_steps_" + std::to_string(n));
        const RunOutput out = run_once(cfg, problem.p, driver.d, step_cfg, dir);
        summary << n << "," << out.errors.max_abs << "," << out.errors.mean_abs << ","
                << out.cap_hits << "," << out.wall_seconds << "\n";
        std::cout << "sweep n_steps=" << n << " max_abs_error=" << out.errors.max_abs
                  << " wall_s=" << out.wall_seconds << "\n";
    }
    std::cout << "sweep summary written to " << (out_root / "sweep_summary.csv") << "\n";
    return 0;
}
