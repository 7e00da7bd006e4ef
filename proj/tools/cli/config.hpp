#pragma once

// Run configurations shared by the command-line flags and `run --config`.
// JSON form: {"command": "<name>", ...fields of that command}. Parsing is
// strict: unknown keys and wrong types are validation errors.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include <gbs_page/errors.hpp>

namespace gbs_cli {

using json = nlohmann::ordered_json;
using gbs_page::ValidationError;

struct AnalyticOptions {
    std::vector<int> alphas{1};
    double s = 0.5;
    std::optional<int> n;  // nullopt = asymptotic
    std::string r_grid = "0:1:0.1";
    double tol = 0.0;
    std::optional<int> i_max;
    std::string out = "-";
    std::string format = "csv";
};

struct SimulateOptions {
    int n = 0;
    std::optional<int> k;
    std::optional<double> r;
    std::vector<double> s;                   // one value = equal squeezing, else per mode
    std::optional<std::vector<double>> s_uniform;  // [lo, hi]: draw s_i ~ U[lo, hi] from the seed
    std::vector<int> alphas{1, 2};
    int samples = 100;
    std::uint64_t seed = 0;
    std::string threads = "1";
    std::string out_prefix = "gbs_page";
};

struct LimitsOptions {
    std::vector<int> alphas{1};
    std::string regime = "small";
    std::string r_grid = "0:1:0.1";
    std::optional<std::vector<double>> s_vector;
    std::string out = "-";
};

struct FigureOptions {
    std::string name;
    std::string scale = "desk";
    std::uint64_t seed = 11;
    std::string out_dir = ".";
    std::string threads = "1";
    bool gnuplot = false;
};

using RunConfig = std::variant<AnalyticOptions, SimulateOptions, LimitsOptions, FigureOptions>;

inline const char* command_name(const RunConfig& c) {
    static const char* names[] = {"analytic", "simulate", "limits", "figure"};
    return names[c.index()];
}

// ---------------------------------------------------------------------------
// to JSON

inline json to_json(const AnalyticOptions& o) {
    json j;
    j["command"] = "analytic";
    j["alphas"] = o.alphas;
    j["s"] = o.s;
    if (o.n) j["n"] = *o.n; else j["asymptotic"] = true;
    j["r_grid"] = o.r_grid;
    j["tol"] = o.tol;
    if (o.i_max) j["i_max"] = *o.i_max;
    j["out"] = o.out;
    j["format"] = o.format;
    return j;
}

inline json to_json(const SimulateOptions& o) {
    json j;
    j["command"] = "simulate";
    j["n"] = o.n;
    if (o.k) j["k"] = *o.k;
    if (o.r) j["r"] = *o.r;
    if (o.s_uniform) j["s_uniform"] = *o.s_uniform; else j["s"] = o.s;
    j["alphas"] = o.alphas;
    j["samples"] = o.samples;
    j["seed"] = o.seed;
    j["threads"] = o.threads;
    j["out_prefix"] = o.out_prefix;
    return j;
}

inline json to_json(const LimitsOptions& o) {
    json j;
    j["command"] = "limits";
    j["alphas"] = o.alphas;
    j["regime"] = o.regime;
    j["r_grid"] = o.r_grid;
    if (o.s_vector) j["s_vector"] = *o.s_vector;
    j["out"] = o.out;
    return j;
}

inline json to_json(const FigureOptions& o) {
    json j;
    j["command"] = "figure";
    j["name"] = o.name;
    j["scale"] = o.scale;
    j["seed"] = o.seed;
    j["out_dir"] = o.out_dir;
    j["threads"] = o.threads;
    j["gnuplot"] = o.gnuplot;
    return j;
}

inline json to_json(const RunConfig& c) {
    return std::visit([](const auto& o) { return to_json(o); }, c);
}

// ---------------------------------------------------------------------------
// from JSON

namespace detail {

inline void only_keys(const json& j, std::set<std::string> allowed) {
    allowed.insert("command");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw ValidationError("config: unknown key \"" + key + "\"");
    }
}

template <class T>
T get(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: bad or missing \"") + key + "\": " + e.what());
    }
}

template <class T>
void maybe(const json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = get<T>(j, key);
}

template <class T>
void maybe(const json& j, const char* key, std::optional<T>& dst) {
    if (j.contains(key)) dst = get<T>(j, key);
}

/// "threads" may be an integer or "auto".
inline std::string threads_field(const json& j) {
    if (!j.contains("threads")) return "1";
    const auto& t = j.at("threads");
    if (t.is_number_integer()) return std::to_string(t.get<int>());
    if (t.is_string()) return t.get<std::string>();
    throw ValidationError("config: \"threads\" must be an integer or \"auto\"");
}

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
    using namespace detail;
    if (!j.is_object()) throw ValidationError("config: expected a JSON object");
    // A simulate summary ({"config": ..., "results": ...}) re-runs its config.
    if (j.contains("config") && !j.contains("command")) {
        only_keys(j, {"config", "results"});
        return config_from_json(j.at("config"));
    }
    const auto cmd = get<std::string>(j, "command");
    if (cmd == "analytic") {
        only_keys(j, {"alphas", "s", "n", "asymptotic", "r_grid", "tol", "i_max", "out", "format"});
        AnalyticOptions o;
        maybe(j, "alphas", o.alphas);
        maybe(j, "s", o.s);
        maybe(j, "n", o.n);
        const bool asym = j.contains("asymptotic") && get<bool>(j, "asymptotic");
        if (asym == o.n.has_value()) throw ValidationError("config: give exactly one of \"n\" and \"asymptotic\": true");
        maybe(j, "r_grid", o.r_grid);
        maybe(j, "tol", o.tol);
        maybe(j, "i_max", o.i_max);
        maybe(j, "out", o.out);
        maybe(j, "format", o.format);
        return o;
    }
    if (cmd == "simulate") {
        only_keys(j, {"n", "k", "r", "s", "s_uniform", "alphas", "samples", "seed", "threads", "out_prefix"});
        SimulateOptions o;
        o.n = get<int>(j, "n");
        maybe(j, "k", o.k);
        maybe(j, "r", o.r);
        maybe(j, "s", o.s);
        maybe(j, "s_uniform", o.s_uniform);
        maybe(j, "alphas", o.alphas);
        maybe(j, "samples", o.samples);
        maybe(j, "seed", o.seed);
        o.threads = threads_field(j);
        maybe(j, "out_prefix", o.out_prefix);
        return o;
    }
    if (cmd == "limits") {
        only_keys(j, {"alphas", "regime", "r_grid", "s_vector", "out"});
        LimitsOptions o;
        maybe(j, "alphas", o.alphas);
        maybe(j, "regime", o.regime);
        maybe(j, "r_grid", o.r_grid);
        maybe(j, "s_vector", o.s_vector);
        maybe(j, "out", o.out);
        return o;
    }
    if (cmd == "figure") {
        only_keys(j, {"name", "scale", "seed", "out_dir", "threads", "gnuplot"});
        FigureOptions o;
        o.name = get<std::string>(j, "name");
        maybe(j, "scale", o.scale);
        maybe(j, "seed", o.seed);
        maybe(j, "out_dir", o.out_dir);
        o.threads = threads_field(j);
        maybe(j, "gnuplot", o.gnuplot);
        return o;
    }
    throw ValidationError("config: unknown command \"" + cmd + "\"");
}

}  // namespace gbs_cli
