// Command-line front end: argument parsing, subcommand dispatch, canned
// reproduction runs, and provenance-stamped output files. Identical argv and
// seed produce byte-identical artifacts (timestamps are opt-in).
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qcorr/correlation.hpp"
#include "qcorr/io.hpp"
#include "qcorr/ising.hpp"
#include "qcorr/qpt.hpp"
#include "qcorr/version.hpp"

namespace qcorr::cli {

// Flag validation failures; mapped to exit code 2 (computation errors exit 1).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string out;
    std::string format;  // per-subcommand default filled during validation
    std::uint64_t seed = 20240815;
    int threads = 0;  // 0 = logical cores; QCORR_THREADS env wins over the flag
    bool timestamps = false;
    std::string log_level = "info";
    std::vector<std::string> command;  // argv echo for provenance
};

namespace detail {

inline void log(const Common& c, const char* level, const std::string& msg) {
    if (c.log_level == "quiet") return;
    if (std::string(level) == "debug" && c.log_level != "debug") return;
    std::fprintf(stderr, "[qcorr] %s\n", msg.c_str());
}

inline std::string iso_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct GridSpec {
    double lo = 0.0, hi = 0.0;
    int points = 0;
};

// "MIN:MAX:POINTS" with POINTS total points including both endpoints.
inline GridSpec parse_grid_spec(const std::string& s) {
    GridSpec g;
    char trail;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &g.lo, &g.hi, &g.points, &trail) != 3)
        throw UsageError("grid spec must be MIN:MAX:POINTS, got '" + s + "'");
    if (!(g.hi > g.lo) || g.points < 2)
        throw UsageError("grid spec needs MAX > MIN and POINTS >= 2, got '" + s + "'");
    return g;
}

inline int parse_n_spec(const std::string& s) {
    if (s == "inf") return 0;
    try {
        std::size_t pos = 0;
        int n = std::stoi(s, &pos);
        if (pos != s.size() || n < 4 || n % 2) throw std::invalid_argument("");
        return n;
    } catch (const std::exception&) {
        throw UsageError("--n must be 'inf' or an even integer >= 4, got '" + s + "'");
    }
}

inline std::vector<int> parse_n_list(const std::string& s) {
    std::vector<int> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t comma = s.find(',', start);
        std::string tok = s.substr(start, comma == std::string::npos ? comma : comma - start);
        try {
            std::size_t pos = 0;
            int n = std::stoi(tok, &pos);
            if (pos != tok.size() || n < 4 || n % 2) throw std::invalid_argument("");
            out.push_back(n);
        } catch (const std::exception&) {
            throw UsageError("--n-list must be comma-separated even integers >= 4, got '" + s +
                             "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw UsageError("--n-list is empty");
    return out;
}

inline EntropyKind parse_kind_checked(const std::string& name, std::optional<double> alpha) {
    try {
        return parse_kind(name, alpha);
    } catch (const Error& e) {
        throw UsageError(e.what());  // bad kind/alpha is a flag problem, not a compute one
    }
}

inline json kind_json(const EntropyKind& k) {
    json j{{"label", kind_label(k)}};
    if (k.alpha_is_inf)
        j["alpha"] = "inf";
    else
        j["alpha"] = k.alpha;
    return j;
}

inline json ansatz_json(const ProductAnsatz& a) {
    return json{{"bloch_A", {a.bloch_A(0), a.bloch_A(1), a.bloch_A(2)}},
                {"bloch_B", {a.bloch_B(0), a.bloch_B(1), a.bloch_B(2)}}};
}

inline json result_json(const CorrelationResult& r) {
    return json{{"total", r.total},
                {"classical", r.classical},
                {"quantum", r.quantum},
                {"kind", kind_json(r.kind)},
                {"argmin_total", ansatz_json(r.argmin_total)},
                {"measurement", {{"theta", r.argmax_measurement.theta},
                                 {"phi", r.argmax_measurement.phi}}},
                {"argmin_post", ansatz_json(r.argmin_post)},
                {"diagnostics",
                 {{"total_starts_converged", r.diagnostics.total_starts_converged},
                  {"post_starts_converged", r.diagnostics.post_starts_converged},
                  {"raw_quantum", r.diagnostics.raw_quantum},
                  {"dpi_range_warning", r.diagnostics.dpi_range_warning}}}};
}

inline Provenance provenance(const Common& c, json defaults) {
    Provenance p;
    p.command = c.command;
    p.defaults = std::move(defaults);
    p.seed = c.seed;
    if (c.timestamps) p.timestamp = iso_now();
    return p;
}

inline void write_or_print(const Common& c, const std::string& text) {
    if (c.out.empty())
        std::fputs(text.c_str(), stdout);
    else
        save_text(c.out, text);
}

inline void emit_json(const Common& c, json payload, json defaults) {
    json env = envelope(std::move(payload), provenance(c, std::move(defaults)));
    write_or_print(c, env.dump(2) + "\n");
}

inline void emit_csv(const Common& c, const CsvTable& t) { write_or_print(c, to_csv(t)); }

inline DensityMatrix family_state(const std::string& family, double param) {
    if (param < 0.0 || param > 1.0)
        throw UsageError("--param must lie in [0,1] for family '" + family + "'");
    if (family == "pure") return pure_schmidt(param);
    if (family == "werner") return werner(param);
    if (family == "bellmix") return bell_mixture(param);
    if (family == "bellnoise") return bell_product_mixture(param);
    throw UsageError("unknown --family '" + family + "'");
}

inline CorrelationResult evaluate(const DensityMatrix& rho, const EntropyKind& kind,
                                  const OptimizerConfig& cfg, const WarmStart* warm = nullptr) {
    return kind.is_von_neumann() ? von_neumann_discord(rho, cfg, warm)
                                 : quantum_correlation(rho, kind, cfg, warm);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Canned reproduction runs. Exposed as plain table builders so the acceptance
// suite can reuse them; `fast` shrinks grids for smoke runs (same pipeline,
// not publication density).

inline CsvTable figure_table(int fig, bool fast, std::uint64_t seed) {
    CsvTable t;
    OptimizerConfig cfg;
    cfg.starts = 16;
    cfg.measurement_grid = 12;
    cfg.seed = seed;
    auto fmt = [](double x) { return format_double(x); };

    if (fig == 1) {  // pure states, sandwiched Renyi orders (alpha=1 is the vN limit)
        t.header = {"lambda", "D_a0.5", "D_a0.7", "D_a1", "D_a2", "D_a5"};
        for (double lam : uniform_grid(0.0, 1.0, fast ? 101 : 201)) {
            std::vector<std::string> row{fmt(lam)};
            for (double a : {0.5, 0.7})
                row.push_back(fmt(pure_closed_form(lam, EntropyKind::renyi_sandwiched(a)).quantum));
            row.push_back(fmt(binary_entropy(lam)));  // alpha->1: entanglement entropy
            for (double a : {2.0, 5.0})
                row.push_back(fmt(pure_closed_form(lam, EntropyKind::renyi_sandwiched(a)).quantum));
            t.rows.push_back(std::move(row));
        }
        return t;
    }

    if (fig == 3) {  // Werner states; alpha < 2/3 columns are numeric (anomaly region)
        t.header = {"p", "D_a0.5", "D_a0.6", "D_a0.7", "D_a1", "D_a2"};
        std::vector<double> grid = uniform_grid(0.0, 1.0, fast ? 41 : 101);
        std::map<double, std::vector<double>> numeric;
        for (double a : {0.5, 0.6}) {
            WarmStart warm;
            OptimizerConfig point_cfg = cfg;
            for (double p : grid) {
                CorrelationResult r =
                    quantum_correlation(werner(p), EntropyKind::renyi_sandwiched(a), point_cfg,
                                        warm.valid ? &warm : nullptr);
                numeric[a].push_back(r.quantum);
                warm = {r.argmin_total, r.argmax_measurement, r.argmin_post, true};
                point_cfg = qcorr::detail::reduced_cfg(cfg);
            }
        }
        std::vector<double> vn_col;
        {
            WarmStart warm;
            OptimizerConfig point_cfg = cfg;
            for (double p : grid) {
                CorrelationResult r =
                    von_neumann_discord(werner(p), point_cfg, warm.valid ? &warm : nullptr);
                vn_col.push_back(r.quantum);
                warm = {r.argmin_total, r.argmax_measurement, r.argmin_post, true};
                point_cfg = qcorr::detail::reduced_cfg(cfg);
            }
        }
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double p = grid[i];
            t.rows.push_back({fmt(p), fmt(numeric[0.5][i]), fmt(numeric[0.6][i]),
                              fmt(werner_closed_form(p, EntropyKind::renyi_sandwiched(0.7)).quantum),
                              fmt(vn_col[i]),
                              fmt(werner_closed_form(p, EntropyKind::renyi_sandwiched(2.0)).quantum)});
        }
        return t;
    }

    if (fig == 4) {  // Bell mixture, all closed forms
        t.header = {"p", "D_a0.7", "D_a1", "D_a2", "D_a5", "D_linear", "D_max"};
        for (double p : uniform_grid(0.0, 1.0, fast ? 101 : 201)) {
            std::vector<std::string> row{fmt(p)};
            row.push_back(fmt(bell_mixture_closed_form(p, EntropyKind::renyi_sandwiched(0.7)).quantum));
            row.push_back(fmt(1.0 - binary_entropy(p)));  // alpha->1 limit of the closed form
            for (double a : {2.0, 5.0})
                row.push_back(fmt(bell_mixture_closed_form(p, EntropyKind::renyi_sandwiched(a)).quantum));
            row.push_back(fmt(bell_mixture_closed_form(p, EntropyKind::linear()).quantum));
            row.push_back(fmt(bell_mixture_closed_form(p, EntropyKind::max_entropy()).quantum));
            t.rows.push_back(std::move(row));
        }
        return t;
    }

    if (fig == 5) {  // Bell/product-noise mixture, numeric only
        t.header = {"p", "D_a0.7", "D_a2"};
        std::vector<double> grid = uniform_grid(0.0, 1.0, fast ? 26 : 51);
        std::map<double, std::vector<double>> numeric;
        for (double a : {0.7, 2.0}) {
            WarmStart warm;
            OptimizerConfig point_cfg = cfg;
            for (double p : grid) {
                CorrelationResult r =
                    quantum_correlation(bell_product_mixture(p), EntropyKind::renyi_sandwiched(a),
                                        point_cfg, warm.valid ? &warm : nullptr);
                numeric[a].push_back(r.quantum);
                warm = {r.argmin_total, r.argmax_measurement, r.argmin_post, true};
                point_cfg = qcorr::detail::reduced_cfg(cfg);
            }
        }
        for (std::size_t i = 0; i < grid.size(); ++i)
            t.rows.push_back({fmt(grid[i]), fmt(numeric[0.7][i]), fmt(numeric[2.0][i])});
        return t;
    }

    if (fig == 8) {  // infinite-chain nearest-neighbor discord across the QPT
        t.header = {"lambda", "D_a0.7", "D_a2", "D_vn"};
        std::vector<double> grid = fast ? uniform_grid(0.1, 3.0, 30) : uniform_grid(0.04, 3.0, 75);
        SweepCurve c07 = sweep_discord(grid, IsingPoint{1.0, 0}, EntropyKind::renyi_sandwiched(0.7), cfg);
        SweepCurve c2 = sweep_discord(grid, IsingPoint{1.0, 0}, EntropyKind::renyi_sandwiched(2.0), cfg);
        SweepCurve cvn = sweep_discord(grid, IsingPoint{1.0, 0}, EntropyKind::von_neumann(), cfg);
        for (std::size_t i = 0; i < grid.size(); ++i)
            t.rows.push_back({fmt(grid[i]), fmt(c07.values[i]), fmt(c2.values[i]), fmt(cvn.values[i])});
        return t;
    }

    throw UsageError("--figure must be one of 1, 3, 4, 5, 8");
}

// Peak-drift scaling exponents for Renyi and Tsallis order-alpha discord,
// with the reference values they are compared against. One component sweep
// per (alpha, N) serves both families via the exact trace map.
inline CsvTable table1_table(bool fast, std::uint64_t seed) {
    OptimizerConfig cfg;
    cfg.starts = 16;
    cfg.measurement_grid = 12;
    cfg.seed = seed;
    std::vector<double> alphas = fast ? std::vector<double>{2.0} : std::vector<double>{2.0, 10.0, 50.0};
    std::vector<int> ladder = fast ? std::vector<int>{64, 128, 256, 512} : default_n_ladder();
    std::vector<double> grid = fast ? uniform_grid(0.8, 1.2, 201) : default_scaling_grid();
    const std::map<double, double> ref_renyi{{2.0, -3.45}, {10.0, -1.28}, {50.0, -1.25}};
    const std::map<double, double> ref_tsallis{{2.0, -3.74}, {10.0, -0.87}, {50.0, -2.74}};

    CsvTable t;
    t.header = {"family", "alpha", "exponent", "reference", "r_squared", "n_min", "n_max"};
    for (double a : alphas) {
        std::vector<ScalingSample> renyi_samples, tsallis_samples;
        for (int n : ladder) {
            ComponentSweep comp = qcorr::sweep_components(
                grid, IsingPoint{1.0, n}, EntropyKind::renyi_sandwiched(a), cfg);
            SweepCurve dr, dt;
            dr.lambdas = dt.lambdas = comp.lambdas;
            dr.meta = dt.meta = comp.meta;
            for (std::size_t i = 0; i < comp.total.size(); ++i) {
                dr.values.push_back(comp.total[i] - comp.classical[i]);
                dt.values.push_back(qcorr::detail::renyi_to_tsallis(comp.total[i], a) -
                                    qcorr::detail::renyi_to_tsallis(comp.classical[i], a));
            }
            SweepCurve der_r = derivative(dr), der_t = derivative(dt);
            qcorr::detail::PeakInfo pr = qcorr::detail::find_peak(der_r);
            qcorr::detail::PeakInfo pt = qcorr::detail::find_peak(der_t);
            renyi_samples.push_back({n, pr.lambda, std::nan(""), pr.height});
            tsallis_samples.push_back({n, pt.lambda, std::nan(""), pt.height});
        }
        auto emit_fit = [&](const char* family, const std::vector<ScalingSample>& samples,
                            double reference) {
            std::vector<std::string> row{family, format_double(a)};
            try {
                ScalingFit fit = fit_scaling(samples, ScalingTarget::LambdaC);
                row.push_back(format_double(fit.exponent));
                row.push_back(format_double(reference));
                row.push_back(format_double(fit.r_squared));
            } catch (const Error&) {  // drift too noisy to fit at this order
                row.push_back("nan");
                row.push_back(format_double(reference));
                row.push_back("nan");
            }
            row.push_back(std::to_string(ladder.front()));
            row.push_back(std::to_string(ladder.back()));
            t.rows.push_back(std::move(row));
        };
        emit_fit("renyi", renyi_samples, ref_renyi.at(a));
        emit_fit("tsallis", tsallis_samples, ref_tsallis.at(a));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Subcommand handlers.

namespace detail {

struct StateOrFamily {
    std::string state_path, family;
    double param = 0.0;
    bool has_param = false;
};

inline DensityMatrix resolve_state(const StateOrFamily& s) {
    if (!s.state_path.empty()) {
        if (!s.family.empty()) throw UsageError("--state and --family are mutually exclusive");
        return load_state(s.state_path);
    }
    if (s.family.empty()) throw UsageError("need either --state FILE or --family NAME");
    if (!s.has_param) throw UsageError("--family requires --param");
    return family_state(s.family, s.param);
}

inline json source_json(const StateOrFamily& s) {
    if (!s.state_path.empty()) return json{{"state", s.state_path}};
    return json{{"family", s.family}, {"param", s.param}};
}

} // namespace detail

inline int run(std::vector<std::string> args) {
    Common common;
    common.command.push_back(artifact_name);
    for (const auto& a : args) common.command.push_back(a);

    CLI::App app{"Renyi/Tsallis correlation toolkit for two-qubit states and the "
                 "transverse-field Ising chain"};
    app.require_subcommand(1);

    // shared flags, attached to every subcommand so they sit after its name
    auto add_common = [&common](CLI::App* sub, const char* default_format) {
        common.format.clear();
        sub->add_option("--out", common.out, "Output file (default: stdout)");
        sub->add_option("--format", common.format,
                        std::string("Output format: csv or json (default: ") + default_format + ")")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", common.seed, "Optimizer RNG seed")->capture_default_str();
        sub->add_option("--threads", common.threads,
                        "Worker threads (default: logical cores; QCORR_THREADS env overrides)");
        sub->add_flag("--timestamps", common.timestamps,
                      "Stamp outputs with wall-clock time (breaks byte-identical reruns)");
        sub->add_option("--log-level", common.log_level, "quiet, info, or debug")
            ->check(CLI::IsMember({"quiet", "info", "debug"}))
            ->capture_default_str();
    };

    // entropy
    auto* ent = app.add_subcommand("entropy", "Relative entropy between two state files");
    std::string ent_rho, ent_sigma, ent_kind;
    double ent_alpha = 0.0;
    ent->add_option("--rho", ent_rho, "State JSON file (numerator)")->required();
    ent->add_option("--sigma", ent_sigma, "State JSON file (reference)")->required();
    ent->add_option("--kind", ent_kind,
                    "renyi-s, renyi-t, tsallis-s, tsallis-t, min, max, collision, linear, vn")
        ->required();
    auto* ent_alpha_opt = ent->add_option("--alpha", ent_alpha, "Order for the renyi-*/tsallis-* kinds");
    add_common(ent, "json");

    // discord
    auto* dis = app.add_subcommand("discord", "Total/classical/quantum correlation of one state");
    detail::StateOrFamily dis_src;
    std::string dis_kind;
    double dis_alpha = 0.0;
    int dis_starts = 64;
    double dis_tol = 1e-9;
    dis->add_option("--state", dis_src.state_path, "State JSON file");
    dis->add_option("--family", dis_src.family, "pure, werner, bellmix, or bellnoise");
    auto* dis_param_opt = dis->add_option("--param", dis_src.param, "Family parameter in [0,1]");
    dis->add_option("--kind", dis_kind, "Entropy kind (see `entropy --help`)")->required();
    auto* dis_alpha_opt = dis->add_option("--alpha", dis_alpha, "Order for the renyi-*/tsallis-* kinds");
    dis->add_option("--starts", dis_starts, "Multistart count for the product-state minimization")
        ->capture_default_str();
    dis->add_option("--tol", dis_tol, "Optimizer objective tolerance")->capture_default_str();
    add_common(dis, "json");

    // sweep
    auto* swp = app.add_subcommand("sweep", "Correlations across a family parameter grid");
    std::string swp_family, swp_grid_spec, swp_kind;
    double swp_alpha = 0.0;
    int swp_starts = 64;
    double swp_tol = 1e-9;
    swp->add_option("--family", swp_family, "pure, werner, bellmix, or bellnoise")->required();
    swp->add_option("--param-grid", swp_grid_spec, "MIN:MAX:POINTS (inclusive endpoints)")
        ->required();
    swp->add_option("--kind", swp_kind, "Entropy kind")->required();
    auto* swp_alpha_opt = swp->add_option("--alpha", swp_alpha, "Order for the renyi-*/tsallis-* kinds");
    swp->add_option("--starts", swp_starts, "Multistart count (first point; later points warm-start)")
        ->capture_default_str();
    swp->add_option("--tol", swp_tol, "Optimizer objective tolerance")->capture_default_str();
    add_common(swp, "csv");

    // ising-state
    auto* ist = app.add_subcommand("ising-state", "Nearest-neighbor state of the Ising chain");
    double ist_lambda = 1.0;
    std::string ist_n = "inf";
    ist->add_option("--lambda", ist_lambda, "Transverse field / coupling ratio, >= 0")->required();
    ist->add_option("--n", ist_n, "Chain length: even integer >= 4, or 'inf'")->capture_default_str();
    add_common(ist, "json");

    // ising-sweep
    auto* isw = app.add_subcommand("ising-sweep", "Discord and its derivative across lambda");
    std::string isw_grid_spec, isw_n = "inf", isw_kind;
    double isw_alpha = 0.0;
    int isw_starts = 16;
    double isw_tol = 1e-9;
    bool isw_compare_vn = false;
    isw->add_option("--lambda", isw_grid_spec, "MIN:MAX:POINTS, inside (0, 3]")->required();
    isw->add_option("--n", isw_n, "Chain length: even integer >= 4, or 'inf'")->capture_default_str();
    isw->add_option("--kind", isw_kind, "Entropy kind")->required();
    auto* isw_alpha_opt = isw->add_option("--alpha", isw_alpha, "Order for the renyi-*/tsallis-* kinds");
    isw->add_flag("--compare-vn", isw_compare_vn, "Add von Neumann discord columns");
    isw->add_option("--starts", isw_starts, "Multistart count (first point; later points warm-start)")
        ->capture_default_str();
    isw->add_option("--tol", isw_tol, "Optimizer objective tolerance")->capture_default_str();
    add_common(isw, "csv");

    // scaling
    auto* scl = app.add_subcommand("scaling", "Finite-size scaling of the derivative peak");
    std::string scl_n_list, scl_kind, scl_target, scl_grid_spec = "0.8:1.2:401";
    double scl_alpha = 0.0;
    int scl_starts = 16;
    double scl_tol = 1e-9;
    scl->add_option("--n-list", scl_n_list, "Comma-separated even chain lengths, e.g. 64,128,256")
        ->required();
    scl->add_option("--kind", scl_kind, "Entropy kind")->required();
    auto* scl_alpha_opt = scl->add_option("--alpha", scl_alpha, "Order for the renyi-*/tsallis-* kinds");
    scl->add_option("--target", scl_target, "Fit target: fwhm or lambda-c")->required();
    scl->add_option("--grid", scl_grid_spec, "Lambda grid MIN:MAX:POINTS")->capture_default_str();
    scl->add_option("--starts", scl_starts, "Multistart count (first point; later points warm-start)")
        ->capture_default_str();
    scl->add_option("--tol", scl_tol, "Optimizer objective tolerance")->capture_default_str();
    add_common(scl, "csv");

    // reproduce
    auto* rep = app.add_subcommand("reproduce", "Regenerate canned figure/table data");
    int rep_figure = 0, rep_table = 0;
    bool rep_fast = false;
    auto* rep_fig_opt = rep->add_option("--figure", rep_figure, "Figure number: 1, 3, 4, 5, or 8");
    auto* rep_tab_opt = rep->add_option("--table", rep_table, "Table number: 1");
    rep->add_flag("--fast", rep_fast, "Reduced grids for smoke runs (same pipeline, lower density)");
    add_common(rep, "csv");

    try {
        std::vector<const char*> argv;
        argv.push_back(artifact_name);
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "%s\n", json{{"error", "usage"}, {"message", e.what()}}.dump().c_str());
        return 2;
    }

    auto fail = [](const char* category, const std::string& msg) {
        std::fprintf(stderr, "%s\n",
                     json{{"error", category}, {"message", msg}}.dump().c_str());
    };

    try {
        if (common.threads > 0) thread_override_slot(common.threads);
        auto opt_alpha = [](CLI::Option* o, double v) {
            return o->count() ? std::optional<double>(v) : std::nullopt;
        };
        auto fmt = [](double x) { return format_double(x); };

        if (ent->parsed()) {
            if (common.format.empty()) common.format = "json";
            EntropyKind kind = detail::parse_kind_checked(ent_kind, opt_alpha(ent_alpha_opt, ent_alpha));
            DensityMatrix rho = load_state(ent_rho);
            DensityMatrix sigma = load_state(ent_sigma);
            ExtendedReal v = relative_entropy(rho, sigma, kind);
            json defaults{{"kind", detail::kind_json(kind)}, {"rho", ent_rho}, {"sigma", ent_sigma}};
            if (common.format == "json") {
                json payload{{"kind", detail::kind_json(kind)},
                             {"infinite", v.is_infinite},
                             {"value", v.is_infinite ? json(nullptr) : json(v.value)}};
                detail::emit_json(common, std::move(payload), std::move(defaults));
            } else {
                CsvTable t;
                t.header = {"kind", "alpha", "value"};
                t.rows = {{kind_label(kind), kind.alpha_is_inf ? "inf" : fmt(kind.alpha),
                           v.is_infinite ? "inf" : fmt(v.value)}};
                detail::emit_csv(common, t);
            }
            return 0;
        }

        if (dis->parsed()) {
            if (common.format.empty()) common.format = "json";
            dis_src.has_param = dis_param_opt->count() > 0;
            EntropyKind kind = detail::parse_kind_checked(dis_kind, opt_alpha(dis_alpha_opt, dis_alpha));
            if (dis_starts < 2 || dis_tol <= 0.0)
                throw UsageError("--starts must be >= 2 and --tol positive");
            DensityMatrix rho = detail::resolve_state(dis_src);
            OptimizerConfig cfg;
            cfg.starts = dis_starts;
            cfg.objective_tol = dis_tol;
            cfg.seed = common.seed;
            detail::log(common, "info", "optimizing " + kind_label(kind) + " correlations");
            CorrelationResult r = detail::evaluate(rho, kind, cfg);
            json defaults{{"starts", cfg.starts},       {"tol", cfg.objective_tol},
                          {"max_iters", cfg.max_iters}, {"measurement_grid", cfg.measurement_grid},
                          {"source", detail::source_json(dis_src)}};
            if (common.format == "json") {
                json payload = detail::result_json(r);
                payload["source"] = detail::source_json(dis_src);
                detail::emit_json(common, std::move(payload), std::move(defaults));
            } else {
                CsvTable t;
                t.header = {"source", "param", "kind", "alpha", "I", "J", "D"};
                t.rows = {{dis_src.state_path.empty() ? dis_src.family : dis_src.state_path,
                           dis_src.state_path.empty() ? fmt(dis_src.param) : "",
                           kind_label(kind), kind.alpha_is_inf ? "inf" : fmt(kind.alpha),
                           fmt(r.total), fmt(r.classical), fmt(r.quantum)}};
                detail::emit_csv(common, t);
            }
            return 0;
        }

        if (swp->parsed()) {
            if (common.format.empty()) common.format = "csv";
            EntropyKind kind = detail::parse_kind_checked(swp_kind, opt_alpha(swp_alpha_opt, swp_alpha));
            detail::GridSpec gs = detail::parse_grid_spec(swp_grid_spec);
            if (gs.lo < 0.0 || gs.hi > 1.0)
                throw UsageError("--param-grid must lie inside [0,1] for state families");
            if (swp_starts < 2 || swp_tol <= 0.0)
                throw UsageError("--starts must be >= 2 and --tol positive");
            std::vector<double> grid = uniform_grid(gs.lo, gs.hi, gs.points);
            OptimizerConfig cfg;
            cfg.starts = swp_starts;
            cfg.objective_tol = swp_tol;
            cfg.seed = common.seed;
            detail::log(common, "info", "sweeping " + swp_family + " over " + swp_grid_spec);
            CsvTable t;
            t.header = {"param", "I", "J", "D"};
            std::vector<json> points;
            WarmStart warm;
            OptimizerConfig point_cfg = cfg;
            for (double p : grid) {
                CorrelationResult r = detail::evaluate(detail::family_state(swp_family, p), kind, point_cfg,
                                                       warm.valid ? &warm : nullptr);
                t.rows.push_back({fmt(p), fmt(r.total), fmt(r.classical), fmt(r.quantum)});
                points.push_back(json{{"param", p}, {"I", r.total}, {"J", r.classical}, {"D", r.quantum}});
                warm = {r.argmin_total, r.argmax_measurement, r.argmin_post, true};
                point_cfg = qcorr::detail::reduced_cfg(cfg);
            }
            json defaults{{"family", swp_family}, {"param_grid", swp_grid_spec},
                          {"kind", detail::kind_json(kind)}, {"starts", cfg.starts},
                          {"tol", cfg.objective_tol}};
            if (common.format == "json")
                detail::emit_json(common, json{{"points", points}}, std::move(defaults));
            else
                detail::emit_csv(common, t);
            return 0;
        }

        if (ist->parsed()) {
            if (common.format.empty()) common.format = "json";
            if (ist_lambda < 0.0) throw UsageError("--lambda must be >= 0");
            int n = detail::parse_n_spec(ist_n);
            IsingCorrelators c = correlators_for(IsingPoint{ist_lambda, n});
            DensityMatrix rho = nearest_neighbor_state(c);
            json defaults{{"lambda", ist_lambda}, {"n", ist_n}};
            if (common.format == "json") {
                json payload{{"lambda", ist_lambda},
                             {"n", n == 0 ? json("inf") : json(n)},
                             {"correlators",
                              {{"t_xx", c.t_xx}, {"t_yy", c.t_yy}, {"t_zz", c.t_zz}, {"m_z", c.m_z}}},
                             {"state", state_to_json(rho)}};
                detail::emit_json(common, std::move(payload), std::move(defaults));
            } else {
                CsvTable t;
                t.header = {"lambda", "n", "t_xx", "t_yy", "t_zz", "m_z"};
                t.rows = {{fmt(ist_lambda), n == 0 ? "inf" : std::to_string(n), fmt(c.t_xx),
                           fmt(c.t_yy), fmt(c.t_zz), fmt(c.m_z)}};
                detail::emit_csv(common, t);
            }
            return 0;
        }

        if (isw->parsed()) {
            if (common.format.empty()) common.format = "csv";
            EntropyKind kind = detail::parse_kind_checked(isw_kind, opt_alpha(isw_alpha_opt, isw_alpha));
            detail::GridSpec gs = detail::parse_grid_spec(isw_grid_spec);
            if (gs.lo <= 0.0 || gs.hi > 3.0)
                throw UsageError("--lambda grid must lie inside (0, 3]");
            if (gs.points < 3) throw UsageError("--lambda grid needs >= 3 points for the derivative");
            if (isw_starts < 2 || isw_tol <= 0.0)
                throw UsageError("--starts must be >= 2 and --tol positive");
            int n = detail::parse_n_spec(isw_n);
            std::vector<double> grid = uniform_grid(gs.lo, gs.hi, gs.points);
            OptimizerConfig cfg;
            cfg.starts = isw_starts;
            cfg.objective_tol = isw_tol;
            cfg.seed = common.seed;
            detail::log(common, "info", "sweeping lambda over " + isw_grid_spec +
                                            (n == 0 ? " (infinite chain)" : " (N=" + std::to_string(n) + ")"));
            SweepCurve curve = sweep_discord(grid, IsingPoint{1.0, n}, kind, cfg);
            SweepCurve der = derivative(curve);
            SweepCurve vn_curve, vn_der;
            if (isw_compare_vn) {
                vn_curve = sweep_discord(grid, IsingPoint{1.0, n}, EntropyKind::von_neumann(), cfg);
                vn_der = derivative(vn_curve);
            }
            json defaults{{"lambda_grid", isw_grid_spec}, {"n", isw_n},
                          {"kind", detail::kind_json(kind)}, {"starts", cfg.starts},
                          {"tol", cfg.objective_tol}, {"compare_vn", isw_compare_vn}};
            if (common.format == "json") {
                json payload{{"lambda", curve.lambdas}, {"D", curve.values}, {"dD_dlambda", der.values},
                             {"spacing", curve.meta.spacing}};
                if (isw_compare_vn) {
                    payload["D_vn"] = vn_curve.values;
                    payload["dDvn_dlambda"] = vn_der.values;
                }
                detail::emit_json(common, std::move(payload), std::move(defaults));
            } else {
                CsvTable t;
                t.header = {"lambda", "D", "dD_dlambda"};
                if (isw_compare_vn) {
                    t.header.push_back("D_vn");
                    t.header.push_back("dDvn_dlambda");
                }
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    std::vector<std::string> row{fmt(grid[i]), fmt(curve.values[i]), fmt(der.values[i])};
                    if (isw_compare_vn) {
                        row.push_back(fmt(vn_curve.values[i]));
                        row.push_back(fmt(vn_der.values[i]));
                    }
                    t.rows.push_back(std::move(row));
                }
                detail::emit_csv(common, t);
            }
            return 0;
        }

        if (scl->parsed()) {
            if (common.format.empty()) common.format = "csv";
            EntropyKind kind = detail::parse_kind_checked(scl_kind, opt_alpha(scl_alpha_opt, scl_alpha));
            std::vector<int> n_list = detail::parse_n_list(scl_n_list);
            if (scl_target != "fwhm" && scl_target != "lambda-c")
                throw UsageError("--target must be fwhm or lambda-c");
            detail::GridSpec gs = detail::parse_grid_spec(scl_grid_spec);
            if (gs.lo <= 0.0 || gs.hi > 3.0) throw UsageError("--grid must lie inside (0, 3]");
            if (scl_starts < 2 || scl_tol <= 0.0)
                throw UsageError("--starts must be >= 2 and --tol positive");
            std::vector<double> grid = uniform_grid(gs.lo, gs.hi, gs.points);
            OptimizerConfig cfg;
            cfg.starts = scl_starts;
            cfg.objective_tol = scl_tol;
            cfg.seed = common.seed;
            detail::log(common, "info", "scaling run over N in {" + scl_n_list + "}");
            std::vector<ScalingSample> samples = scaling_samples(n_list, grid, kind, cfg);
            ScalingFit fit = fit_scaling(
                samples, scl_target == "fwhm" ? ScalingTarget::Fwhm : ScalingTarget::LambdaC);
            json defaults{{"n_list", scl_n_list}, {"kind", detail::kind_json(kind)},
                          {"target", scl_target}, {"grid", scl_grid_spec},
                          {"starts", cfg.starts}, {"tol", cfg.objective_tol}};
            json fit_json{{"target", scl_target},
                          {"exponent", fit.exponent},
                          {"intercept", fit.intercept},
                          {"r_squared", fit.r_squared},
                          {"samples_used", fit.samples_used}};
            if (common.format == "json") {
                json sample_rows = json::array();
                for (const auto& s : samples)
                    sample_rows.push_back(json{{"n", s.n_sites}, {"lambda_c_n", s.lambda_c_n},
                                               {"delta_n", s.delta_n}, {"peak_height", s.peak_height}});
                detail::emit_json(common, json{{"samples", sample_rows}, {"fit", fit_json}},
                                  std::move(defaults));
            } else {
                CsvTable t;
                t.header = {"n", "lambda_c_n", "delta_n", "peak_height"};
                for (const auto& s : samples)
                    t.rows.push_back({std::to_string(s.n_sites), fmt(s.lambda_c_n), fmt(s.delta_n),
                                      fmt(s.peak_height)});
                detail::emit_csv(common, t);
                // samples go to --out (or stdout); the fit summary always lands on stdout
                json env = envelope(std::move(fit_json), detail::provenance(common, std::move(defaults)));
                if (common.out.empty()) std::fputs("\n", stdout);
                std::fputs((env.dump() + "\n").c_str(), stdout);
            }
            return 0;
        }

        if (rep->parsed()) {
            const bool has_fig = rep_fig_opt->count() > 0, has_tab = rep_tab_opt->count() > 0;
            if (has_fig == has_tab) throw UsageError("need exactly one of --figure or --table");
            if (has_tab && rep_table != 1) throw UsageError("--table must be 1");
            if (has_fig && rep_figure != 1 && rep_figure != 3 && rep_figure != 4 &&
                rep_figure != 5 && rep_figure != 8)
                throw UsageError("--figure must be one of 1, 3, 4, 5, 8");
            std::string out = common.out.empty()
                                  ? (has_fig ? "figure" + std::to_string(rep_figure) + ".csv"
                                             : "table1.csv")
                                  : common.out;
            detail::log(common, "info", "reproducing " +
                                            (has_fig ? "figure " + std::to_string(rep_figure)
                                                     : std::string("table 1")) +
                                            (rep_fast ? " (fast grids)" : ""));
            CsvTable t = has_fig ? figure_table(rep_figure, rep_fast, common.seed)
                                 : table1_table(rep_fast, common.seed);
            save_text(out, to_csv(t));
            json summary{{"written", out}, {"rows", t.rows.size()}, {"fast", rep_fast}};
            std::fputs((summary.dump() + "\n").c_str(), stdout);
            return 0;
        }

        throw UsageError("no subcommand given");
    } catch (const UsageError& e) {
        fail("usage", e.what());
        return 2;
    } catch (const Error& e) {
        fail("compute", e.what());
        return 1;
    } catch (const std::exception& e) {
        fail("compute", e.what());
        return 1;
    }
}

inline int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(std::move(args));
}

} // namespace qcorr::cli
