// moralecon: command-line front end for single runs, threshold sweeps and fits.
//
//   moralecon run --k-th 1.7 --c-th 5.5 --seeds 1-3 --out out/run
//   moralecon sweep --config configs/baseline.json --threads 8 --out out/sweep
//   moralecon fit out/sweep/results.csv --out out/fit
//   moralecon verify-table-s1 data/table_s1.csv
//
// Exit codes: 0 ok, 1 bad input, 2 runtime failure, 3 the surface fit did not
// converge.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "moralecon/errors.hpp"
#include "moralecon/export.hpp"
#include "moralecon/sweep.hpp"

#ifndef MORALECON_DATA_DIR
#define MORALECON_DATA_DIR "data"
#endif

namespace {

using namespace moralecon;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitFit = 3;

struct Common {
    std::string config = "baseline";
    std::string out;
    std::string seeds;
    int threads = 0;
    std::string trace_agents;  // "none" disables
    std::string hist_times;    // years, "none" disables
};

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
    std::vector<T> items;
    if (text == "none") {
        return items;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::istringstream is(item);
        T v{};
        if (!(is >> v) || !is.eof()) {
            throw ValidationError(std::string(flag) + ": cannot parse '" + item + "'");
        }
        items.push_back(v);
    }
    return items;
}

void add_common(CLI::App* cmd, Common& c, bool with_seeds) {
    cmd->add_option("--config", c.config, "JSON config file, or 'baseline' for the preset")
        ->capture_default_str();
    cmd->add_option("--out", c.out, "output directory (default: outputs.dir of the config)");
    if (with_seeds) {
        cmd->add_option("--seeds", c.seeds, "seed list such as 1-10 or 1,4,7 (default 1-10)");
        cmd->add_option("--threads", c.threads, "worker threads (default: hardware concurrency)");
        cmd->add_option("--trace-agents", c.trace_agents,
                        "agent ids to trace in figure cells, e.g. 0,1,2 or none");
        cmd->add_option("--hist-times", c.hist_times,
                        "histogram snapshot years in figure cells, e.g. 1,30,100 or none");
    }
}

SweepConfig load(const Common& c) {
    SweepConfig cfg = parse_config(c.config);
    if (!c.seeds.empty()) {
        cfg.seeds = parse_seed_list(c.seeds);
    }
    if (!c.out.empty()) {
        cfg.outputs.dir = c.out;
    }
    if (!c.trace_agents.empty()) {
        cfg.outputs.trace_agents = parse_list<std::size_t>(c.trace_agents, "--trace-agents");
        cfg.outputs.traces = !cfg.outputs.trace_agents.empty();
    }
    if (!c.hist_times.empty()) {
        cfg.outputs.histogram_years = parse_list<double>(c.hist_times, "--hist-times");
        cfg.outputs.histograms = !cfg.outputs.histogram_years.empty();
    }
    cfg.validate();
    return cfg;
}

int thread_count(int requested) {
    if (requested > 0) {
        return requested;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

ProgressCallback progress_printer() {
    return [](std::size_t done, std::size_t total) {
        const std::size_t every = std::max<std::size_t>(1, total / 20);
        if (done % every == 0 || done == total) {
            std::cerr << "  " << done << "/" << total << " runs\n";
        }
    };
}

void report_timing(const SweepOutcome& outcome) {
    if (outcome.timings.empty()) {
        return;
    }
    const auto slowest = std::max_element(
        outcome.timings.begin(), outcome.timings.end(),
        [](const CellTiming& a, const CellTiming& b) { return a.seconds < b.seconds; });
    double sum = 0.0;
    for (const CellTiming& t : outcome.timings) {
        sum += t.seconds;
    }
    std::fprintf(stderr,
                 "%zu runs in %.1f s wall (%.2f s per run, slowest %.2f s at k_th=%g c_th=%g seed=%llu)\n",
                 outcome.timings.size(), outcome.total_seconds,
                 sum / static_cast<double>(outcome.timings.size()), slowest->seconds,
                 slowest->k_th, slowest->c_th,
                 static_cast<unsigned long long>(slowest->seed));
}

void write_timings(const SweepOutcome& outcome, const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << "k_th,c_th,seed,seconds\n";
    for (const CellTiming& t : outcome.timings) {
        out << format_number(t.k_th) << ',' << format_number(t.c_th) << ',' << t.seed << ','
            << format_number(t.seconds) << '\n';
    }
}

void print_fit_summary(const FitReport& r) {
    if (r.gauss) {
        const GaussSurfaceFit& g = *r.gauss;
        std::printf("gauss: A=%.4g B=%.4g b=%.4g d=%.4g p=%.4g q=%.4g R2=%.4f\n", g.amplitude,
                    g.offset, g.x_center, g.y_center, g.x_curvature, g.y_curvature, g.r_squared);
    } else {
        std::printf("gauss: no convergence (%s)\n", r.gauss_error.c_str());
    }
    std::printf("linear: u_med = %.4g %+.4g g_k  (p=%.3g, R2=%.4f, n=%zu)\n", r.linear.intercept,
                r.linear.slope, r.linear.p_value, r.linear.r_squared, r.linear.n);
    std::printf("peak: balance %.4g at k_th=%g c_th=%g\n", r.peak.mean.balance, r.peak.k_th,
                r.peak.c_th);
    for (const RidgePoint& p : r.ridge) {
        std::printf("ridge: k_th=%g c_th=%g product=%.4g\n", p.k_th, p.c_th, p.product);
    }
}

int finish_sweep(const SweepConfig& cfg, const SweepOutcome& outcome, bool fits, bool timings) {
    const OutputOptions& o = cfg.outputs;
    if (o.summary) {
        write_results_csv(outcome.table, o.dir / "results.csv");
    }
    if (timings) {
        write_timings(outcome, o.dir / "timings.csv");
    }
    export_figures_data(outcome, o);
    report_timing(outcome);
    if (!fits || !o.fit_report) {
        return kExitOk;
    }
    const FitReport report = compute_fits(outcome.table, o.ridge_k_lo, o.ridge_k_hi);
    write_fit_report(report, o.dir);
    print_fit_summary(report);
    return report.gauss ? kExitOk : kExitFit;
}

int cmd_run(const Common& c, double k_th, double c_th, bool timings) {
    SweepConfig cfg = load(c);
    cfg.k_th_grid = {k_th};
    cfg.c_th_grid = {c_th};
    cfg.outputs.figure_cells = {{k_th, c_th}};
    cfg.validate();
    const SweepOutcome outcome = run_sweep(cfg, thread_count(c.threads));
    for (const SweepRow& r : outcome.table) {
        std::printf("seed %llu: k_med=%s u_med=%s g_k=%s g_u=%s balance=%s\n",
                    static_cast<unsigned long long>(r.seed), format_number(r.k_med).c_str(),
                    format_number(r.u_med).c_str(), format_number(r.g_k).c_str(),
                    format_number(r.g_u).c_str(), format_number(r.balance).c_str());
    }
    return finish_sweep(cfg, outcome, false, timings);
}

int cmd_sweep(const Common& c, bool timings) {
    const SweepConfig cfg = load(c);
    const int threads = thread_count(c.threads);
    std::cerr << cfg.k_th_grid.size() * cfg.c_th_grid.size() << " cells x " << cfg.seeds.size()
              << " seeds on " << threads << " threads\n";
    const SweepOutcome outcome = run_sweep(cfg, threads, progress_printer());
    return finish_sweep(cfg, outcome, cfg.k_th_grid.size() * cfg.c_th_grid.size() >= 10, timings);
}

int cmd_fit(const std::string& input, const std::string& out, double k_lo, double k_hi) {
    const SweepTable table = read_results_csv(input);
    const FitReport report = compute_fits(table, k_lo, k_hi);
    if (!out.empty()) {
        write_fit_report(report, out);
    }
    print_fit_summary(report);
    return report.gauss ? kExitOk : kExitFit;
}

int cmd_verify(const std::string& input, const std::string& out, double k_lo, double k_hi) {
    const std::vector<ReferenceRow> rows = load_reference_table(input);
    const ReferenceCheck check = check_reference_balance(rows);
    std::printf("%zu rows, max |u_med/g_k - balance| = %.4g\n", check.rows,
                check.max_abs_deviation);
    for (std::size_t i : check.over_tolerance) {
        const SweepRow& r = rows[i].row;
        const bool explained =
            std::find(check.inconsistent.begin(), check.inconsistent.end(), i) ==
            check.inconsistent.end();
        std::printf("  row k_th=%g c_th=%g: %.4g vs printed %.4g (%s)\n", r.k_th, r.c_th,
                    r.u_med / r.g_k, r.balance,
                    explained ? "within rounding of the printed digits" : "INCONSISTENT");
    }
    SweepTable table;
    for (const ReferenceRow& r : rows) {
        table.push_back(r.row);
    }
    const FitReport report = compute_fits(table, k_lo, k_hi);
    if (!out.empty()) {
        write_fit_report(report, out);
    }
    print_fit_summary(report);
    if (!check.consistent()) {
        std::fprintf(stderr, "error: %zu rows disagree with their printed balance\n",
                     check.inconsistent.size());
        return kExitValidation;
    }
    return report.gauss ? kExitOk : kExitFit;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Agent-based growth economy with moral thresholds"};
    app.require_subcommand(1);

    Common common;
    bool timings = false;

    double k_th = 1.7;
    double c_th = 5.5;
    auto* run_cmd = app.add_subcommand("run", "simulate one (k_th, c_th) cell for each seed");
    add_common(run_cmd, common, true);
    run_cmd->add_option("--k-th", k_th, "capital threshold for redistribution")->capture_default_str();
    run_cmd->add_option("--c-th", c_th, "consumption cap")->capture_default_str();
    run_cmd->add_flag("--timings", timings, "also write timings.csv");

    auto* sweep_cmd = app.add_subcommand("sweep", "simulate the whole threshold grid");
    add_common(sweep_cmd, common, true);
    sweep_cmd->add_flag("--timings", timings, "also write timings.csv");

    std::string fit_input;
    std::string fit_out;
    std::vector<double> ridge{1.7, 10.0};
    auto* fit_cmd = app.add_subcommand("fit", "fit the balance surface and the g_k/u_med line");
    fit_cmd->add_option("results", fit_input, "per-run CSV written by sweep")
        ->required()
        ->check(CLI::ExistingFile);
    fit_cmd->add_option("--out", fit_out, "directory for fit_report.txt/.csv");
    fit_cmd->add_option("--ridge-k-range", ridge, "k_th range of the ridge scan")
        ->expected(2)
        ->capture_default_str();

    std::string table_path = std::string(MORALECON_DATA_DIR) + "/table_s1.csv";
    std::string verify_out;
    auto* verify_cmd = app.add_subcommand(
        "verify-table-s1", "check the reference table's balance column and fit it");
    verify_cmd->add_option("table", table_path, "reference CSV")
        ->check(CLI::ExistingFile)
        ->capture_default_str();
    verify_cmd->add_option("--out", verify_out, "directory for fit_report.txt/.csv");
    verify_cmd->add_option("--ridge-k-range", ridge, "k_th range of the ridge scan")
        ->expected(2)
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (ridge.size() != 2 || ridge[0] > ridge[1]) {
            throw ValidationError("--ridge-k-range: expected lo hi with lo <= hi");
        }
        if (*run_cmd) {
            return cmd_run(common, k_th, c_th, timings);
        }
        if (*sweep_cmd) {
            return cmd_sweep(common, timings);
        }
        if (*fit_cmd) {
            return cmd_fit(fit_input, fit_out, ridge[0], ridge[1]);
        }
        return cmd_verify(table_path, verify_out, ridge[0], ridge[1]);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const FitError& e) {
        std::cerr << "fit error: " << e.what() << '\n';
        return kExitFit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
