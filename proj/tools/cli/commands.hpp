#pragma once

// The gbs-page commands. Each takes a fully populated options struct, does
// all computation first and writes its files at the end from this thread.
//
// Exit codes: 0 ok, 2 validation / bad flags, 3 analytic series hit its
// term cap, 4 numerical failure (Monte-Carlo failures name the sample).

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <gbs_page/gbs_page.hpp>

#include "config.hpp"
#include "csv.hpp"

namespace gbs_cli {

namespace gp = gbs_page;

struct Io {
    std::ostream& out;
    std::ostream& err;
};

/// GBS_PAGE_THREADS, when set, wins over the flag. "auto" = hardware threads.
inline int resolve_threads(const std::string& flag) {
    std::string v = flag;
    if (const char* env = std::getenv("GBS_PAGE_THREADS"); env != nullptr && *env != '\0') v = env;
    if (v == "auto") return gp::resolve_threads(0);
    const double d = parse_double(v, "threads");
    if (d < 1 || d != std::floor(d) || d > 4096) throw ValidationError("threads must be a positive integer or \"auto\"");
    return static_cast<int>(d);
}

// ---------------------------------------------------------------------------
// analytic

struct AnalyticRow {
    int alpha;
    double s;
    gp::ModeCount n;
    gp::PageCurveValue v;
};

namespace detail {

inline void check_alphas(const std::vector<int>& alphas) {
    if (alphas.empty()) throw ValidationError("at least one alpha is required");
    for (int a : alphas) {
        if (a < 1) throw ValidationError("alpha must be an integer >= 1 (1 = von Neumann), got " + std::to_string(a));
    }
}

inline std::string n_cell(const gp::ModeCount& n) { return n ? std::to_string(*n) : "inf"; }

}  // namespace detail

/// One analytic point. The von Neumann series is not used for 0 < |s| < 0.02;
/// there the small-squeezing limit r(1-r) s^2 ln(1/s^2) is returned instead,
/// with i_max_used = 0 and trunc_err = nan.
inline gp::PageCurveValue analytic_point(int alpha, gp::ModeCount n, double s, double r, gp::SeriesOptions opt,
                                         gp::VonNeumannCoefficients* coef) {
    if (alpha >= 2) return gp::renyi_average(alpha, n, s, r, opt);
    const double a = std::abs(s);
    if (a > 0.0 && a < gp::kVonNeumannMinS) {
        const gp::Partition p = gp::make_partition(n, r);
        const double per_mode = gp::vn_small_s_limit(p.r) * s * s * std::log(1.0 / (s * s));
        gp::PageCurveValue out;
        out.value = n ? per_mode * *n : per_mode;
        out.per_mode_value = per_mode;
        out.trunc_err = std::nan("");
        out.realized_r = p.r;
        return out;
    }
    if (coef != nullptr) return gp::von_neumann_average(n, s, r, *coef, opt);
    return gp::von_neumann_average(n, s, r, opt);
}

inline std::vector<AnalyticRow> analytic_rows(const std::vector<int>& alphas, double s, gp::ModeCount n,
                                              const std::vector<double>& rs, gp::SeriesOptions opt) {
    std::vector<AnalyticRow> rows;
    std::optional<gp::VonNeumannCoefficients> coef;
    for (int alpha : alphas) {
        if (alpha == 1 && !coef) coef.emplace(s);
        for (double r : rs) rows.push_back({alpha, s, n, analytic_point(alpha, n, s, r, opt, alpha == 1 ? &*coef : nullptr)});
    }
    return rows;
}

inline const std::vector<std::string>& analytic_header() {
    static const std::vector<std::string> h{"r", "alpha", "s", "n", "value", "per_mode_value", "i_max_used", "trunc_err"};
    return h;
}

inline std::string analytic_csv(const std::vector<AnalyticRow>& rows) {
    CsvTable t(analytic_header());
    for (const auto& row : rows) {
        t.row({fmt(row.v.realized_r), std::to_string(row.alpha), fmt(row.s), detail::n_cell(row.n), fmt(row.v.value),
               fmt(row.v.per_mode_value), std::to_string(row.v.i_max_used), fmt(row.v.trunc_err)});
    }
    return t.text();
}

/// JSON doubles cannot be nan/inf; those become null, as does n when asymptotic.
inline json json_number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline std::string analytic_json(const std::vector<AnalyticRow>& rows) {
    json arr = json::array();
    for (const auto& row : rows) {
        json j;
        j["r"] = row.v.realized_r;
        j["alpha"] = row.alpha;
        j["s"] = row.s;
        j["n"] = row.n ? json(*row.n) : json(nullptr);
        j["value"] = json_number(row.v.value);
        j["per_mode_value"] = json_number(row.v.per_mode_value);
        j["i_max_used"] = row.v.i_max_used;
        j["trunc_err"] = json_number(row.v.trunc_err);
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

inline int cmd_analytic(const AnalyticOptions& o, Io io) {
    detail::check_alphas(o.alphas);
    if (o.format != "csv" && o.format != "json") throw ValidationError("format must be csv or json");
    if (!std::isfinite(o.s)) throw ValidationError("s must be finite");
    if (o.n && *o.n < 1) throw ValidationError("n must be >= 1");
    if (!(o.tol >= 0.0)) throw ValidationError("tol must be >= 0");
    const auto rs = parse_grid(o.r_grid, "r-grid");
    for (double r : rs) {
        if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("r-grid values must lie in [0, 1]");
    }
    const auto rows = analytic_rows(o.alphas, o.s, o.n, rs, {o.tol, o.i_max});
    write_text(o.out, o.format == "csv" ? analytic_csv(rows) : analytic_json(rows), io.out);
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

/// Plan for a simulate run; per-mode squeezing drawn from the seed when
/// s_uniform is given.
inline gp::ExperimentPlan simulate_plan(const SimulateOptions& o) {
    if (o.n < 1) throw ValidationError("n must be >= 1");
    if (o.k.has_value() == o.r.has_value()) throw ValidationError("give exactly one of --k and --r");
    detail::check_alphas(o.alphas);
    gp::ExperimentPlan plan;
    plan.n = o.n;
    plan.k = o.k ? *o.k : gp::partition_size(o.n, *o.r);
    plan.alphas = o.alphas;
    plan.n_samples = o.samples;
    plan.master_seed = o.seed;
    plan.threads = resolve_threads(o.threads);
    if (o.s_uniform) {
        if (!o.s.empty()) throw ValidationError("--s and --s-uniform are mutually exclusive");
        if (o.s_uniform->size() != 2) throw ValidationError("s_uniform must be [lo, hi]");
        plan.squeezing = gp::draw_uniform_squeezing(o.n, (*o.s_uniform)[0], (*o.s_uniform)[1], o.seed);
    } else if (o.s.size() == 1) {
        plan.squeezing = o.s[0];
    } else if (static_cast<int>(o.s.size()) == o.n) {
        plan.squeezing = o.s;
    } else {
        throw ValidationError("--s takes one value or exactly n = " + std::to_string(o.n) + " values (got " +
                              std::to_string(o.s.size()) + ")");
    }
    for (double v : o.s) {
        if (!std::isfinite(v)) throw ValidationError("squeezing must be finite");
    }
    return plan;
}

inline std::string samples_csv(const gp::ExperimentPlan& plan, const gp::ExperimentResult& res) {
    CsvTable t({"sample_index", "alpha", "entropy"});
    for (const auto& rec : res.samples) {
        for (std::size_t a = 0; a < plan.alphas.size(); ++a) {
            t.row({std::to_string(rec.sample_index), std::to_string(plan.alphas[a]), fmt(rec.entropies[a])});
        }
    }
    return t.text();
}

inline json summary_json(const SimulateOptions& o, const gp::ExperimentPlan& plan, const gp::Summary& sm) {
    json results;
    results["n"] = plan.n;
    results["k"] = sm.k;
    results["realized_r"] = sm.realized_r;
    results["n_samples"] = sm.n_samples;
    results["seed"] = plan.master_seed;
    if (const auto* sv = std::get_if<std::vector<double>>(&plan.squeezing)) {
        results["squeezing"] = *sv;
    } else {
        results["squeezing"] = std::get<double>(plan.squeezing);
    }
    json per = json::array();
    for (const auto& a : sm.per_alpha) {
        json j;
        j["alpha"] = a.alpha;
        j["mean"] = json_number(a.mean);
        j["variance"] = json_number(a.variance);
        j["std_error"] = json_number(a.std_error);
        per.push_back(std::move(j));
    }
    results["per_alpha"] = std::move(per);
    json out;
    out["config"] = to_json(o);
    out["results"] = std::move(results);
    return out;
}

inline int cmd_simulate(const SimulateOptions& o, Io io) {
    const auto plan = simulate_plan(o);
    const auto res = gp::run_experiment(plan);
    const std::string samples = samples_csv(plan, res);
    const std::string summary = summary_json(o, plan, res.summary).dump(2) + "\n";
    write_text(o.out_prefix + "_samples.csv", samples, io.out);
    write_text(o.out_prefix + "_summary.json", summary, io.out);
    return 0;
}

// ---------------------------------------------------------------------------
// limits

struct LimitRow {
    double r;
    int alpha;
    std::string regime;
    double value;
    std::string label;
};

/// Value is the coefficient of the label's normalization, except with an
/// s-vector where it is the full small-squeezing prediction
/// alpha/(alpha-1) r(1-r) sum_i s_i^2 (the label names the sum it scales).
inline LimitRow limit_row(int alpha, const std::string& regime, double r, const std::optional<std::vector<double>>& sv) {
    if (sv) {
        if (regime != "small") throw ValidationError("--s-vector applies to the small-squeezing regime only");
        if (alpha < 2) throw ValidationError("--s-vector needs alpha >= 2 (no von Neumann unequal-squeezing formula)");
        return {r, alpha, regime, gp::renyi_unequal_small(alpha, r, *sv), "sum s_i^2"};
    }
    if (regime == "small") {
        if (alpha == 1) return {r, alpha, regime, gp::vn_small_s_limit(r), "s^2 log(1/s^2) n"};
        return {r, alpha, regime, gp::renyi_small_s_limit(alpha, r), "s^2 n"};
    }
    if (regime == "large") {
        return {r, alpha, regime, alpha == 1 ? gp::vn_large_s_limit(r) : gp::renyi_large_s_limit(alpha, r), "s n"};
    }
    throw ValidationError("regime must be small or large");
}

inline int cmd_limits(const LimitsOptions& o, Io io) {
    detail::check_alphas(o.alphas);
    const auto rs = parse_grid(o.r_grid, "r-grid");
    CsvTable t({"r", "alpha", "regime", "value", "normalization_label"});
    for (int alpha : o.alphas) {
        for (double r : rs) {
            const auto row = limit_row(alpha, o.regime, r, o.s_vector);
            t.row({fmt(row.r), std::to_string(row.alpha), row.regime, fmt(row.value), row.label});
        }
    }
    write_text(o.out, t.text(), io.out);
    return 0;
}

// ---------------------------------------------------------------------------
// figure

struct FigureScale {
    int n;
    int samples;
};

inline FigureScale figure_scale(const std::string& scale) {
    if (scale == "desk") return {100, 100};
    if (scale == "full") return {400, 250};
    throw ValidationError("scale must be desk or full");
}

namespace detail {

/// Monte-Carlo point j of a figure runs with master seed `seed + j`.
inline gp::Summary figure_mc(int n, int k, double s, const std::vector<int>& alphas, int samples,
                             std::uint64_t seed, int threads) {
    gp::ExperimentPlan plan;
    plan.n = n;
    plan.k = k;
    plan.squeezing = s;
    plan.alphas = alphas;
    plan.n_samples = samples;
    plan.master_seed = seed;
    plan.emit_per_sample = false;
    plan.threads = threads;
    return gp::run_experiment(plan).summary;
}

inline std::string gnuplot_script(const FigureOptions& o, const std::vector<int>& alphas, const std::string& x,
                                  int y_analytic, int y_sim, int y_err, const std::string& ylabel) {
    std::string g;
    g += "set datafile separator ','\n";
    g += "set key outside right\n";
    g += "set xlabel '" + x + "'\n";
    g += "set ylabel '" + ylabel + "'\n";
    g += "set title '" + o.name + " (" + o.scale + ", seed " + std::to_string(o.seed) + ")'\n";
    g += "plot \\\n";
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        const std::string al = std::to_string(alphas[a]);
        const std::string sel = "($2==" + al + "?";
        g += "  'analytic.csv' every ::1 using 1:" + sel + "$" + std::to_string(y_analytic) +
             ":1/0) with lines lc " + std::to_string(a + 1) + " title 'alpha=" + al + "', \\\n";
        g += "  'simulated.csv' every ::1 using 1:" + sel + "$" + std::to_string(y_sim) + ":1/0):" +
             std::to_string(y_err) + " with yerrorbars pt 7 ps 0.5 lc " + std::to_string(a + 1) + " notitle";
        g += a + 1 < alphas.size() ? ", \\\n" : "\n";
    }
    return g;
}

}  // namespace detail

/// Writes analytic.csv, simulated.csv, manifest.json (and figure.gp with
/// --gnuplot) into out_dir.
///
///   fig1       S_alpha vs r at s = 0.5, alpha in {1..7, 15}; analytic on
///              r = 0:1:0.02, Monte-Carlo on r = 0.05:0.95:0.05.
///   small-s    S_alpha / (s^2 n) vs s in 0.05:1:0.05 at r = 1/2, alpha in
///              {2, 3, 4, 5, 15}, with the limit alpha/(alpha-1) / 4.
///   page-vs-s  S_alpha / (s n) vs s in 0.25:3:0.25 at r = 1/2, alpha in
///              {1, 2, 3}, limit 1. Analytic points past the series cap are
///              skipped and listed in the manifest.
inline int cmd_figure(const FigureOptions& o, Io io) {
    const FigureScale sc = figure_scale(o.scale);
    const int threads = resolve_threads(o.threads);
    json manifest;
    manifest["figure"] = o.name;
    manifest["scale"] = o.scale;
    manifest["n"] = sc.n;
    manifest["samples_per_point"] = sc.samples;
    manifest["seed"] = o.seed;
    manifest["seed_rule"] = "Monte-Carlo point j uses master seed seed + j";
    manifest["config"] = to_json(o);

    std::string analytic;
    std::string simulated;
    std::string gp_script;
    json points = json::array();

    if (o.name == "fig1") {
        const std::vector<int> alphas{1, 2, 3, 4, 5, 6, 7, 15};
        const double s = 0.5;
        const std::string analytic_grid = "0:1:0.02";
        const std::string mc_grid = "0.05:0.95:0.05";
        manifest["alphas"] = alphas;
        manifest["s"] = s;
        manifest["analytic_r_grid"] = analytic_grid;
        manifest["mc_r_grid"] = mc_grid;
        analytic = analytic_csv(analytic_rows(alphas, s, sc.n, parse_grid(analytic_grid), {}));

        CsvTable t({"r", "alpha", "n", "k", "mean", "std_error", "variance", "n_samples", "seed"});
        const auto rs = parse_grid(mc_grid);
        for (std::size_t j = 0; j < rs.size(); ++j) {
            const int k = gp::partition_size(sc.n, rs[j]);
            const std::uint64_t seed = o.seed + j;
            const auto sm = detail::figure_mc(sc.n, k, s, alphas, sc.samples, seed, threads);
            for (const auto& a : sm.per_alpha) {
                t.row({fmt(sm.realized_r), std::to_string(a.alpha), std::to_string(sc.n), std::to_string(k), fmt(a.mean),
                       fmt(a.std_error), fmt(a.variance), std::to_string(sm.n_samples), std::to_string(seed)});
            }
            points.push_back({{"r", sm.realized_r}, {"k", k}, {"seed", seed}});
        }
        simulated = t.text();
        gp_script = detail::gnuplot_script(o, alphas, "r", 5, 5, 6, "S_alpha (nats)");
    } else if (o.name == "small-s" || o.name == "page-vs-s") {
        const bool small = o.name == "small-s";
        const std::vector<int> alphas = small ? std::vector<int>{2, 3, 4, 5, 15} : std::vector<int>{1, 2, 3};
        const std::string s_grid = small ? "0.05:1:0.05" : "0.25:3:0.25";
        const double r = 0.5;
        const int k = gp::partition_size(sc.n, r);
        manifest["alphas"] = alphas;
        manifest["r"] = r;
        manifest["s_grid"] = s_grid;
        manifest["normalization"] = small ? "s^2 n" : "s n";
        auto norm = [&](double s) { return small ? s * s * sc.n : s * sc.n; };
        auto limit = [&](int alpha) {
            return small ? gp::renyi_small_s_limit(alpha, r) : (alpha == 1 ? gp::vn_large_s_limit(r) : gp::renyi_large_s_limit(alpha, r));
        };

        CsvTable ta({"s", "alpha", "n", "value", "normalized", "limit", "i_max_used", "trunc_err"});
        json skipped = json::array();
        const auto ss = parse_grid(s_grid);
        for (int alpha : alphas) {
            for (double s : ss) {
                try {
                    const auto v = analytic_point(alpha, sc.n, s, r, {}, nullptr);
                    ta.row({fmt(s), std::to_string(alpha), std::to_string(sc.n), fmt(v.value), fmt(v.value / norm(s)),
                            fmt(limit(alpha)), std::to_string(v.i_max_used), fmt(v.trunc_err)});
                } catch (const gp::TruncationError&) {
                    skipped.push_back({{"s", s}, {"alpha", alpha}, {"reason", "series term cap"}});
                }
            }
        }
        manifest["skipped_analytic"] = std::move(skipped);
        analytic = ta.text();

        CsvTable tm({"s", "alpha", "n", "k", "mean", "std_error", "normalized_mean", "normalized_std_error",
                     "limit", "n_samples", "seed"});
        for (std::size_t j = 0; j < ss.size(); ++j) {
            const std::uint64_t seed = o.seed + j;
            const auto sm = detail::figure_mc(sc.n, k, ss[j], alphas, sc.samples, seed, threads);
            for (const auto& a : sm.per_alpha) {
                tm.row({fmt(ss[j]), std::to_string(a.alpha), std::to_string(sc.n), std::to_string(k), fmt(a.mean),
                        fmt(a.std_error), fmt(a.mean / norm(ss[j])), fmt(a.std_error / norm(ss[j])),
                        fmt(limit(a.alpha)), std::to_string(sm.n_samples), std::to_string(seed)});
            }
            points.push_back({{"s", ss[j]}, {"k", k}, {"seed", seed}});
        }
        simulated = tm.text();
        gp_script = detail::gnuplot_script(o, alphas, "s", 5, 7, 8, small ? "S_alpha / (s^2 n)" : "S_alpha / (s n)");
    } else {
        throw ValidationError("figure must be fig1, small-s or page-vs-s");
    }
    manifest["mc_points"] = std::move(points);
    manifest["files"] = o.gnuplot ? json::array({"analytic.csv", "simulated.csv", "figure.gp"})
                                    : json::array({"analytic.csv", "simulated.csv"});

    const std::filesystem::path dir(o.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create \"" + o.out_dir + "\": " + ec.message());
    write_text((dir / "analytic.csv").string(), analytic, io.out);
    write_text((dir / "simulated.csv").string(), simulated, io.out);
    write_text((dir / "manifest.json").string(), manifest.dump(2) + "\n", io.out);
    if (o.gnuplot) write_text((dir / "figure.gp").string(), gp_script, io.out);
    return 0;
}

// ---------------------------------------------------------------------------
// dispatch

inline int execute(const RunConfig& c, Io io) {
    return std::visit(
        [&](const auto& o) -> int {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, AnalyticOptions>) return cmd_analytic(o, io);
            else if constexpr (std::is_same_v<T, SimulateOptions>) return cmd_simulate(o, io);
            else if constexpr (std::is_same_v<T, LimitsOptions>) return cmd_limits(o, io);
            else return cmd_figure(o, io);
        },
        c);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config \"" + path + "\"");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("config \"" + path + "\": " + e.what());
    }
    return config_from_json(j);
}

/// Full command line in, exit code out. Never throws.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Average entanglement entropies (Page curves) of Gaussian boson sampling states", "gbs-page"};
    app.require_subcommand(1);

    AnalyticOptions an;
    std::optional<int> an_n;
    bool an_asym = false;
    std::optional<int> an_imax;
    auto* a = app.add_subcommand("analytic", "closed-form average entropy on an r grid");
    a->add_option("--alpha,--alphas", an.alphas, "entropy orders, comma separated; 1 = von Neumann")->delimiter(',');
    a->add_option("--s", an.s, "squeezing strength")->required();
    auto* a_n = a->add_option("--n", an_n, "number of modes");
    auto* a_as = a->add_flag("--asymptotic", an_asym, "per-mode n -> infinity value");
    a_n->excludes(a_as);
    a->add_option("--r-grid", an.r_grid, "start:stop:step (inclusive)")->capture_default_str();
    a->add_option("--tol", an.tol, "relative tolerance (0 = default)");
    a->add_option("--i-max", an_imax, "fixed number of series terms");
    a->add_option("--out", an.out, "output file, - for stdout")->capture_default_str();
    a->add_option("--format", an.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    SimulateOptions sim;
    std::string sim_s;
    std::string sim_uniform;
    std::optional<int> sim_k;
    std::optional<double> sim_r;
    auto* s = app.add_subcommand("simulate", "Monte-Carlo over Haar-random interferometers");
    s->add_option("--n", sim.n, "number of modes")->required();
    auto* s_k = s->add_option("--k", sim_k, "modes in the subsystem");
    auto* s_r = s->add_option("--r", sim_r, "subsystem fraction; k = round(r n)");
    s_k->excludes(s_r);
    auto* s_s = s->add_option("--s", sim_s, "squeezing: one value, or n comma-separated values");
    auto* s_u = s->add_option("--s-uniform", sim_uniform, "lo:hi, draw s_i ~ U[lo, hi] from the seed");
    s_s->excludes(s_u);
    s->add_option("--alphas,--alpha", sim.alphas, "entropy orders; 1 = von Neumann")->delimiter(',');
    s->add_option("--samples", sim.samples)->capture_default_str();
    s->add_option("--seed", sim.seed)->capture_default_str();
    s->add_option("--threads", sim.threads, "worker threads or auto (GBS_PAGE_THREADS overrides)")->capture_default_str();
    s->add_option("--out-prefix", sim.out_prefix)->capture_default_str();

    LimitsOptions lim;
    std::string lim_file;
    auto* l = app.add_subcommand("limits", "leading-order small / large squeezing coefficients");
    l->add_option("--alpha,--alphas", lim.alphas)->delimiter(',');
    l->add_option("--regime", lim.regime)->check(CLI::IsMember({"small", "large"}))->capture_default_str();
    l->add_option("--r-grid", lim.r_grid)->capture_default_str();
    l->add_option("--s-vector", lim_file, "file of per-mode squeezings (unequal, small regime)");
    l->add_option("--out", lim.out)->capture_default_str();

    FigureOptions fig;
    auto* f = app.add_subcommand("figure", "analytic curves and simulated points for one figure");
    f->add_option("name", fig.name)->required()->check(CLI::IsMember({"fig1", "small-s", "page-vs-s"}));
    f->add_option("--scale", fig.scale)->check(CLI::IsMember({"desk", "full"}))->capture_default_str();
    f->add_option("--seed", fig.seed)->capture_default_str();
    f->add_option("--out-dir", fig.out_dir)->capture_default_str();
    f->add_option("--threads", fig.threads)->capture_default_str();
    f->add_flag("--gnuplot", fig.gnuplot, "also write figure.gp");

    std::string config_path;
    auto* run = app.add_subcommand("run", "re-run a JSON config or a simulate summary");
    run->add_option("--config", config_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        if (a->parsed()) {
            if (an_n.has_value() == an_asym) throw ValidationError("give exactly one of --n and --asymptotic");
            an.n = an_n;
            an.i_max = an_imax;
            cfg = an;
        } else if (s->parsed()) {
            sim.k = sim_k;
            sim.r = sim_r;
            if (!sim_s.empty()) sim.s = parse_double_list(sim_s, "--s");
            if (!sim_uniform.empty()) {
                const auto lohi = split(sim_uniform, ':');
                if (lohi.size() != 2) throw ValidationError("--s-uniform expects lo:hi");
                sim.s_uniform = std::vector<double>{parse_double(lohi[0], "--s-uniform"), parse_double(lohi[1], "--s-uniform")};
            }
            if (sim.s.empty() && !sim.s_uniform) throw ValidationError("one of --s and --s-uniform is required");
            cfg = sim;
        } else if (l->parsed()) {
            if (!lim_file.empty()) lim.s_vector = read_number_file(lim_file, "--s-vector");
            cfg = lim;
        } else if (f->parsed()) {
            cfg = fig;
        } else {
            cfg = load_config(config_path);
        }
        return execute(cfg, {out, err});
    } catch (const gp::TruncationError& e) {
        err << "gbs-page: " << e.what() << " (partial value " << fmt(e.partial_value()) << " after "
            << e.terms_used() << " terms)\n";
        return 3;
    } catch (const gp::ValidationError& e) {
        err << "gbs-page: invalid input: " << e.what() << "\n";
        return 2;
    } catch (const gp::NumericalError& e) {
        err << "gbs-page: numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "gbs-page: numerical failure: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace gbs_cli
