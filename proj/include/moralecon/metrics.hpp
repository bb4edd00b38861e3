#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace moralecon {

/// Gini index of a non-negative sample, from the rank-weighted sum of the
/// ascending sort. Lies in [0, (n-1)/n].
///
/// Throws DomainError on empty input, negative values, or a zero sum.
double gini(std::span<const double> values);

/// Middle element for odd n, mean of the two middle elements for even n.
/// Throws DomainError on empty input.
double median(std::span<const double> values);

/// u_med / g_k. Throws DomainError when g_k is zero.
double balance_index(double u_med, double g_k);

/// One sweep run summarised.
struct SweepRow {
    double k_th = 0.0;
    double c_th = 0.0;
    std::uint64_t seed = 0;
    double k_med = 0.0;
    double u_med = 0.0;
    double g_k = 0.0;
    double g_u = 0.0;
    double balance = 0.0;
};

using SweepTable = std::vector<SweepRow>;

/// Seed statistics of one (k_th, c_th) cell.
struct CellSummary {
    double k_th = 0.0;
    double c_th = 0.0;
    int runs = 0;
    SweepRow mean;  // seed field unused
    SweepRow stddev;  // sample standard deviation; zero for a single run
};

/// Groups rows by (k_th, c_th), in ascending (k_th, c_th) order.
std::vector<CellSummary> aggregate_cells(const SweepTable& table);

struct SurfacePoint {
    double k_th = 0.0;
    double c_th = 0.0;
    double value = 0.0;
};

/// value ~ amplitude * exp(-p (ln k_th - b)^2 - q (ln c_th - d)^2) + offset
struct GaussSurfaceFit {
    double amplitude = 0.0;
    double offset = 0.0;
    double x_center = 0.0;  // b, on ln k_th
    double y_center = 0.0;  // d, on ln c_th
    double x_curvature = 0.0;  // p
    double y_curvature = 0.0;  // q
    double r_squared = 0.0;
    double ss_res = 0.0;
    int iterations = 0;

    double operator()(double k_th, double c_th) const;
};

/// Levenberg-Marquardt fit of the Gauss-type surface. Starts from
/// offset = min, amplitude = max - min, centres at the log of the argmax
/// point, p = 1, q = 0.04. Stops when SS_res changes by less than 1e-10
/// relative between accepted steps.
///
/// Throws ValidationError with fewer than 10 points and FitError (with the
/// residual history) when 500 iterations pass without convergence.
GaussSurfaceFit fit_gauss_surface(std::span<const SurfacePoint> points);

/// Fits the per-cell mean balance of a sweep table.
GaussSurfaceFit fit_gauss_surface(const SweepTable& table);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double p_value = 1.0;  // two-sided t-test on the slope, n - 2 dof
    double r_squared = 0.0;
    std::size_t n = 0;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Ordinary least squares. Throws ValidationError with fewer than three
/// points or zero variance in x.
LinearFit fit_linear(std::span<const Point2> points);

/// Two-sided p-value of a Student-t statistic.
double student_t_two_sided_p(double t, double dof);

struct RidgePoint {
    double k_th = 0.0;
    double c_th = 0.0;  // argmax of mean balance within the column
    double product = 0.0;
};

/// For every k_th column in [k_lo, k_hi], the c_th with the largest mean
/// balance and the product k_th * c_th.
std::vector<RidgePoint> ridge_products(const SweepTable& table, double k_lo, double k_hi);

}  // namespace moralecon
