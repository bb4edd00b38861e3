#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "moralecon/metrics.hpp"
#include "moralecon/sweep.hpp"

namespace moralecon {

/// Six significant digits, "inf"/"nan" for non-finite values.
std::string format_number(double value);

/// Writes `path` (one row per run, header
/// k_th,c_th,seed,k_med,u_med,g_k,g_u,balance) and a companion
/// `<stem>_agg.csv` with per-cell seed means and standard deviations.
/// Throws std::runtime_error naming the path on I/O failure.
void write_results_csv(const SweepTable& table, const std::filesystem::path& path);

/// Inverse of write_results_csv() for the per-run file.
SweepTable read_results_csv(const std::filesystem::path& path);

std::filesystem::path aggregate_path_for(const std::filesystem::path& results_path);

/// Histogram CSVs (bin_lo,bin_hi,count) per figure cell, quantity and time.
/// Returns the files written.
std::vector<std::filesystem::path> export_histograms(const CellArtifacts& run,
                                                     const std::filesystem::path& dir);

/// One CSV per traced agent with columns t,k,c,u.
std::vector<std::filesystem::path> export_traces(const CellArtifacts& run,
                                                 const std::filesystem::path& dir);

/// Grid surfaces of the cell means (k_med, u_med, g_k, g_u, balance), the
/// (g_k, u_med) scatter, and optionally an SVG contour of the balance
/// surface with its peak marked.
std::vector<std::filesystem::path> export_surfaces(const SweepTable& table,
                                                   const std::filesystem::path& dir, bool svg);

/// Everything the sweep's output toggles ask for.
std::vector<std::filesystem::path> export_figures_data(const SweepOutcome& outcome,
                                                       const OutputOptions& options);

/// Renders a self-contained SVG heat map with iso-lines over a
/// log-spaced grid.
std::string balance_contour_svg(const std::vector<CellSummary>& cells);

struct FitReport {
    std::optional<GaussSurfaceFit> gauss;
    std::string gauss_error;  // set when the fit did not converge
    LinearFit linear;
    std::vector<RidgePoint> ridge;
    CellSummary peak;
};

/// Runs the Gauss-surface fit, the (g_k, u_med) regression over cell means,
/// and the ridge scan. Fit failures are captured in the report.
FitReport compute_fits(const SweepTable& table, double ridge_k_lo, double ridge_k_hi);

/// Writes fit_report.txt and fit_report.csv into `dir`.
std::vector<std::filesystem::path> write_fit_report(const FitReport& report,
                                                    const std::filesystem::path& dir);

/// One row of a reference table, with the number of decimals
/// each printed value carried.
struct ReferenceRow {
    SweepRow row;
    int u_med_decimals = 0;
    int g_k_decimals = 0;
    int balance_decimals = 0;
};

/// Reads a CSV with header k_th,c_th,k_med,u_med,g_k,g_u,balance.
std::vector<ReferenceRow> load_reference_table(const std::filesystem::path& path);

struct ReferenceCheck {
    std::size_t rows = 0;
    double max_abs_deviation = 0.0;  // |u_med/g_k - balance|
    /// Rows off by more than the flat tolerance.
    std::vector<std::size_t> over_tolerance;
    /// Rows whose deviation cannot be explained by rounding of the printed
    /// values either.
    std::vector<std::size_t> inconsistent;
    bool consistent() const { return inconsistent.empty(); }
};

/// Recomputes balance = u_med / g_k for every row and compares it with the
/// printed balance. A row is inconsistent when it misses `tolerance` and the
/// interval implied by half a unit in the last printed digit of u_med, g_k
/// and balance does not contain the recomputed value either.
ReferenceCheck check_reference_balance(const std::vector<ReferenceRow>& rows,
                                       double tolerance = 0.2);

}  // namespace moralecon
