// JSON config reader for sweeps. See configs/baseline.json for the schema.

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "moralecon/errors.hpp"
#include "moralecon/sweep.hpp"

namespace moralecon {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) {
        throw ValidationError(path + ": expected an object");
    }
}

void reject_unknown(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw ValidationError(join(path, key) + ": unknown key");
        }
    }
}

template <typename T>
void read(const json& j, const std::string& path, const char* key, T& out) {
    if (!j.contains(key)) {
        return;
    }
    const json& v = j.at(key);
    const std::string where = join(path, key);
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) {
            throw ValidationError(where + ": expected true or false");
        }
        out = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) {
            throw ValidationError(where + ": expected an integer");
        }
        out = v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) {
            throw ValidationError(where + ": expected a number");
        }
        out = v.get<T>();
    } else {
        if (!v.is_string()) {
            throw ValidationError(where + ": expected a string");
        }
        out = v.get<T>();
    }
}

template <typename T>
void read_list(const json& j, const std::string& path, const char* key, std::vector<T>& out) {
    if (!j.contains(key)) {
        return;
    }
    const json& v = j.at(key);
    const std::string where = join(path, key);
    if (!v.is_array()) {
        throw ValidationError(where + ": expected an array");
    }
    std::vector<T> items;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const bool ok = std::is_integral_v<T> ? v[i].is_number_unsigned() : v[i].is_number();
        if (!ok) {
            throw ValidationError(where + "[" + std::to_string(i) + "]: expected " +
                                  (std::is_integral_v<T> ? "a non-negative integer" : "a number"));
        }
        items.push_back(v[i].get<T>());
    }
    out = std::move(items);
}

void read_economy(const json& j, EconomyParams& econ) {
    const std::string path = "economy";
    require_object(j, path);
    reject_unknown(j, path, {"alpha", "delta", "rho", "time_preference", "theta", "gamma0"});
    read(j, path, "alpha", econ.alpha);
    read(j, path, "delta", econ.delta);
    read(j, path, "theta", econ.theta);
    read(j, path, "gamma0", econ.gamma0);
    if (j.contains("rho") && j.contains("time_preference")) {
        throw ValidationError("economy: give either rho or time_preference, not both");
    }
    read(j, path, "rho", econ.rho);
    if (j.contains("time_preference")) {
        double phi = 0.0;
        read(j, path, "time_preference", phi);
        econ.rho = rho_from_time_preference(phi);
    }
}

void read_business(const json& j, BusinessParams& b) {
    const std::string path = "business";
    require_object(j, path);
    reject_unknown(j, path, {"savings_rate", "profit_width", "pairs", "period_days"});
    read(j, path, "savings_rate", b.savings_rate);
    read(j, path, "profit_width", b.profit_width);
    read(j, path, "pairs", b.pairs);
    read(j, path, "period_days", b.period_days);
}

void read_redistribution(const json& j, RedistSchedule& r) {
    const std::string path = "redistribution";
    require_object(j, path);
    reject_unknown(j, path, {"period_years", "start_years", "timing"});
    read(j, path, "period_years", r.period_years);
    read(j, path, "start_years", r.start_years);
    if (j.contains("timing")) {
        std::string timing;
        read(j, path, "timing", timing);
        if (timing == "extended-period") {
            r.timing = RedistTiming::kExtendedPeriod;
        } else if (timing == "offset-period") {
            r.timing = RedistTiming::kOffsetPeriod;
        } else {
            throw ValidationError(
                "redistribution.timing: expected \"extended-period\" or \"offset-period\", got \"" +
                timing + "\"");
        }
    }
}

void read_schedule(const json& j, ScheduleConfig& s) {
    const std::string path = "schedule";
    require_object(j, path);
    reject_unknown(j, path, {"agents", "horizon_years"});
    read(j, path, "agents", s.agents);
    read(j, path, "horizon_years", s.horizon_years);
}

void read_outputs(const json& j, OutputOptions& o) {
    const std::string path = "outputs";
    require_object(j, path);
    reject_unknown(j, path,
                   {"dir", "summary", "histograms", "traces", "surfaces", "fit_report", "svg",
                    "trace_agents", "trace_cadence_days", "histogram_years", "histogram_bins",
                    "figure_cells", "ridge_k_range"});
    std::string dir = o.dir.string();
    read(j, path, "dir", dir);
    o.dir = dir;
    read(j, path, "summary", o.summary);
    read(j, path, "histograms", o.histograms);
    read(j, path, "traces", o.traces);
    read(j, path, "surfaces", o.surfaces);
    read(j, path, "fit_report", o.fit_report);
    read(j, path, "svg", o.svg);
    read_list(j, path, "trace_agents", o.trace_agents);
    read(j, path, "trace_cadence_days", o.trace_cadence_days);
    read_list(j, path, "histogram_years", o.histogram_years);
    read(j, path, "histogram_bins", o.histogram_bins);
    if (j.contains("figure_cells")) {
        const json& cells = j.at("figure_cells");
        const std::string where = join(path, "figure_cells");
        if (!cells.is_array()) {
            throw ValidationError(where + ": expected an array of [k_th, c_th] pairs");
        }
        o.figure_cells.clear();
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const json& c = cells[i];
            if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
                throw ValidationError(where + "[" + std::to_string(i) +
                                      "]: expected [k_th, c_th]");
            }
            o.figure_cells.push_back({c[0].get<double>(), c[1].get<double>()});
        }
    }
    if (j.contains("ridge_k_range")) {
        std::vector<double> range;
        read_list(j, path, "ridge_k_range", range);
        if (range.size() != 2 || range[0] > range[1]) {
            throw ValidationError(join(path, "ridge_k_range") + ": expected [lo, hi] with lo <= hi");
        }
        o.ridge_k_lo = range[0];
        o.ridge_k_hi = range[1];
    }
}

}  // namespace

SweepConfig parse_config_text(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: invalid JSON: ") + e.what());
    }
    require_object(root, "config");
    reject_unknown(root, "", {"preset", "economy", "business", "redistribution", "schedule",
                              "capital_drift", "grid", "seeds", "outputs"});

    SweepConfig cfg = baseline_config();
    if (root.contains("preset")) {
        std::string preset;
        read(root, "", "preset", preset);
        if (preset != "baseline") {
            throw ValidationError("preset: unknown preset \"" + preset + "\"");
        }
    }
    if (root.contains("economy")) {
        read_economy(root.at("economy"), cfg.model.economy);
    }
    if (root.contains("business")) {
        read_business(root.at("business"), cfg.model.business);
    }
    if (root.contains("redistribution")) {
        read_redistribution(root.at("redistribution"), cfg.model.redistribution);
    }
    if (root.contains("schedule")) {
        read_schedule(root.at("schedule"), cfg.model.schedule);
    }
    if (root.contains("capital_drift")) {
        std::string drift;
        read(root, "", "capital_drift", drift);
        if (drift == "single-step") {
            cfg.model.capital_drift = CapitalDrift::kSingleStep;
        } else if (drift == "accumulate") {
            cfg.model.capital_drift = CapitalDrift::kAccumulate;
        } else {
            throw ValidationError("capital_drift: expected \"single-step\" or \"accumulate\", got \"" +
                                  drift + "\"");
        }
    }
    if (root.contains("grid")) {
        const json& g = root.at("grid");
        require_object(g, "grid");
        reject_unknown(g, "grid", {"k_th", "c_th"});
        read_list(g, "grid", "k_th", cfg.k_th_grid);
        read_list(g, "grid", "c_th", cfg.c_th_grid);
    }
    read_list(root, "", "seeds", cfg.seeds);
    if (root.contains("outputs")) {
        read_outputs(root.at("outputs"), cfg.outputs);
    }
    cfg.validate();
    return cfg;
}

SweepConfig parse_config(const std::string& path_or_preset) {
    if (path_or_preset == "baseline") {
        return baseline_config();
    }
    std::ifstream in(path_or_preset);
    if (!in) {
        throw ValidationError("config: cannot open '" + path_or_preset + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

}  // namespace moralecon
