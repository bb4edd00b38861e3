#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "moralecon/engine.hpp"
#include "moralecon/metrics.hpp"

namespace moralecon {

/// Which artifacts a sweep writes, and how the figure cells are traced.
struct OutputOptions {
    std::filesystem::path dir = "out";
    bool summary = true;
    bool histograms = true;
    bool traces = true;
    bool surfaces = true;
    bool fit_report = true;
    bool svg = true;
    std::vector<std::size_t> trace_agents{0, 1, 2};
    int trace_cadence_days = 365;
    std::vector<double> histogram_years{1.0, 30.0, 100.0};
    int histogram_bins = 40;
    /// Cells whose first seed is traced and histogrammed.
    std::vector<MoralParams> figure_cells{{100.0, 100.0}, {1.7, 5.5}};
    /// k_th columns scanned for the complementarity ridge.
    double ridge_k_lo = 1.7;
    double ridge_k_hi = 10.0;
};

struct SweepConfig {
    ModelConfig model;
    std::vector<double> k_th_grid;
    std::vector<double> c_th_grid;
    std::vector<std::uint64_t> seeds;
    OutputOptions outputs;

    void validate() const;
};

/// rho = ln(1 / phi) for a time-preference factor phi in (0, 1).
double rho_from_time_preference(double phi);

/// The baseline calibration: 1000 agents, daily steps, 17 pairs a day,
/// redistribution every 10 years starting at 5, 100-year horizon,
/// alpha = 0.5, delta = 0.1, phi = 0.8, theta = 0.5, gamma0 = 0,
/// lambda = 0.25, eps_w = 0.1, a 9x9 threshold grid, seeds 1..10.
SweepConfig baseline_config();

/// The nine threshold values used on both grid axes of the baseline.
std::vector<double> baseline_grid();

/// Reads a JSON config file. Keys left out take their baseline values;
/// unknown keys are rejected. The name "baseline" selects the preset without
/// reading a file.
///
/// Throws ValidationError naming the offending field path.
SweepConfig parse_config(const std::string& path_or_preset);
SweepConfig parse_config_text(const std::string& json_text);

/// Parses "1,2,5" or "1-10" (ranges inclusive, comma-combinable).
std::vector<std::uint64_t> parse_seed_list(const std::string& spec);

/// A traced run of one figure cell.
struct CellArtifacts {
    MoralParams cell;
    std::uint64_t seed = 0;
    std::vector<TraceRow> traces;
    std::vector<HistogramSnapshot> histograms;
};

struct CellTiming {
    double k_th = 0.0;
    double c_th = 0.0;
    std::uint64_t seed = 0;
    double seconds = 0.0;
};

struct SweepOutcome {
    SweepTable table;  // ordered by (k_th, c_th, seed)
    std::vector<CellTiming> timings;
    std::vector<CellArtifacts> artifacts;
    double total_seconds = 0.0;
};

/// Thrown when one cell of a sweep fails; the message carries the cell
/// coordinates and the engine's diagnostic.
class CellFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every (k_th, c_th, seed) task on `threads` workers. Each task owns its
/// engine; results are placed by task index, so the table does not depend on
/// scheduling.
SweepOutcome run_sweep(const SweepConfig& config, int threads,
                       const ProgressCallback& progress = {});

SweepRow summarize(const RunResult& result, const MoralParams& cell, std::uint64_t seed);

}  // namespace moralecon
