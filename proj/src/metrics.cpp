#include "moralecon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "moralecon/errors.hpp"

namespace moralecon {

double gini(std::span<const double> values) {
    if (values.empty()) {
        throw DomainError("gini: empty sample");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::stable_sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0.0) {
        throw DomainError("gini: negative value " + std::to_string(sorted.front()));
    }
    // Rank-weighted sum of the ascending sample, folded so that rank q pairs
    // with rank n+1-q:  sum_q (2q - n - 1) v_q = sum_{q <= n/2} (n + 1 - 2q)(v_{n+1-q} - v_q).
    // Equal samples give exactly zero.
    const std::size_t n = sorted.size();
    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t q = 0; q < n / 2; ++q) {
        weighted += static_cast<double>(n - 1 - 2 * q) * (sorted[n - 1 - q] - sorted[q]);
    }
    for (double v : sorted) {
        total += v;
    }
    if (!(total > 0.0)) {
        throw DomainError("gini: sample sums to zero");
    }
    return weighted / (static_cast<double>(n) * total);
}

double median(std::span<const double> values) {
    if (values.empty()) {
        throw DomainError("median: empty sample");
    }
    std::vector<double> v(values.begin(), values.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return (lower + upper) / 2.0;
}

double balance_index(double u_med, double g_k) {
    if (g_k == 0.0) {
        throw DomainError("balance_index: Gini index is zero (perfectly equal capital)");
    }
    return u_med / g_k;
}

std::vector<CellSummary> aggregate_cells(const SweepTable& table) {
    std::map<std::pair<double, double>, std::vector<const SweepRow*>> cells;
    for (const SweepRow& row : table) {
        cells[{row.k_th, row.c_th}].push_back(&row);
    }
    std::vector<CellSummary> out;
    out.reserve(cells.size());
    for (const auto& [key, rows] : cells) {
        CellSummary s;
        s.k_th = key.first;
        s.c_th = key.second;
        s.runs = static_cast<int>(rows.size());
        s.mean.k_th = s.stddev.k_th = key.first;
        s.mean.c_th = s.stddev.c_th = key.second;
        constexpr double SweepRow::*fields[] = {&SweepRow::k_med, &SweepRow::u_med,
                                                &SweepRow::g_k,   &SweepRow::g_u,
                                                &SweepRow::balance};
        const auto n = static_cast<double>(rows.size());
        for (auto field : fields) {
            double sum = 0.0;
            for (const SweepRow* r : rows) {
                sum += r->*field;
            }
            const double mean = sum / n;
            double ss = 0.0;
            for (const SweepRow* r : rows) {
                ss += (r->*field - mean) * (r->*field - mean);
            }
            s.mean.*field = mean;
            s.stddev.*field = rows.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        }
        out.push_back(s);
    }
    return out;
}

double GaussSurfaceFit::operator()(double k_th, double c_th) const {
    const double dx = std::log(k_th) - x_center;
    const double dy = std::log(c_th) - y_center;
    return amplitude * std::exp(-x_curvature * dx * dx - y_curvature * dy * dy) + offset;
}

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

GaussSurfaceFit to_fit(const Vec6& p) {
    GaussSurfaceFit f;
    f.amplitude = p[0];
    f.offset = p[1];
    f.x_center = p[2];
    f.y_center = p[3];
    f.x_curvature = p[4];
    f.y_curvature = p[5];
    return f;
}

double sum_sq_residuals(const Vec6& p, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& z) {
    double ss = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double dx = x[i] - p[2];
        const double dy = y[i] - p[3];
        const double r = p[0] * std::exp(-p[4] * dx * dx - p[5] * dy * dy) + p[1] - z[i];
        ss += r * r;
    }
    return ss;
}

}  // namespace

GaussSurfaceFit fit_gauss_surface(std::span<const SurfacePoint> points) {
    if (points.size() < 10) {
        throw ValidationError("fit_gauss_surface: need at least 10 cells, got " +
                              std::to_string(points.size()));
    }
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::VectorXd x(n), y(n), z(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const SurfacePoint& pt = points[static_cast<std::size_t>(i)];
        if (!(pt.k_th > 0.0 && pt.c_th > 0.0) || !std::isfinite(pt.value)) {
            throw ValidationError("fit_gauss_surface: point " + std::to_string(i) +
                                  " has non-positive thresholds or a non-finite value");
        }
        x[i] = std::log(pt.k_th);
        y[i] = std::log(pt.c_th);
        z[i] = pt.value;
    }

    Eigen::Index peak = 0;
    z.maxCoeff(&peak);
    const double zmin = z.minCoeff();
    Vec6 p;
    p << z[peak] - zmin, zmin, x[peak], y[peak], 1.0, 0.04;

    const double ss_tot = (z.array() - z.mean()).square().sum();
    double ss = sum_sq_residuals(p, x, y, z);
    double lambda = 1e-3;
    std::vector<double> history{ss};
    constexpr int kMaxIterations = 500;
    constexpr double kRelTol = 1e-10;

    Eigen::MatrixXd jac(n, 6);
    Eigen::VectorXd res(n);
    int it = 0;
    bool converged = false;
    for (; it < kMaxIterations && !converged; ++it) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double dx = x[i] - p[2];
            const double dy = y[i] - p[3];
            const double e = std::exp(-p[4] * dx * dx - p[5] * dy * dy);
            const double ae = p[0] * e;
            res[i] = ae + p[1] - z[i];
            jac(i, 0) = e;
            jac(i, 1) = 1.0;
            jac(i, 2) = 2.0 * p[4] * dx * ae;
            jac(i, 3) = 2.0 * p[5] * dy * ae;
            jac(i, 4) = -dx * dx * ae;
            jac(i, 5) = -dy * dy * ae;
        }
        const Eigen::Matrix<double, 6, 6> jtj = jac.transpose() * jac;
        const Vec6 grad = jac.transpose() * res;

        // Marquardt damping: retry with a larger lambda until SS_res drops.
        bool accepted = false;
        while (!accepted) {
            Eigen::Matrix<double, 6, 6> a = jtj;
            a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
            const Vec6 step = a.ldlt().solve(-grad);
            const Vec6 trial = p + step;
            const double trial_ss = sum_sq_residuals(trial, x, y, z);
            if (std::isfinite(trial_ss) && trial_ss <= ss) {
                const double change = ss - trial_ss;
                p = trial;
                ss = trial_ss;
                history.push_back(ss);
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                converged = change <= kRelTol * ss || ss <= 1e-30 * std::max(ss_tot, 1.0);
            } else {
                lambda *= 10.0;
                if (lambda > 1e16) {
                    // No descent direction left at machine precision.
                    accepted = true;
                    converged = true;
                }
            }
        }
    }

    if (!converged) {
        std::ostringstream msg;
        msg << "fit_gauss_surface: no convergence after " << kMaxIterations
            << " iterations; SS_res history (first, last 3):";
        msg << ' ' << history.front();
        for (std::size_t i = history.size() > 3 ? history.size() - 3 : 0; i < history.size(); ++i) {
            msg << ' ' << history[i];
        }
        throw FitError(msg.str());
    }

    GaussSurfaceFit fit = to_fit(p);
    fit.ss_res = ss;
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss / ss_tot : 1.0;
    fit.iterations = it;
    return fit;
}

GaussSurfaceFit fit_gauss_surface(const SweepTable& table) {
    std::vector<SurfacePoint> points;
    for (const CellSummary& cell : aggregate_cells(table)) {
        points.push_back({cell.k_th, cell.c_th, cell.mean.balance});
    }
    return fit_gauss_surface(points);
}

double student_t_two_sided_p(double t, double dof) {
    if (std::isinf(t)) {
        return 0.0;
    }
    const boost::math::students_t dist(dof);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

LinearFit fit_linear(std::span<const Point2> points) {
    if (points.size() < 3) {
        throw ValidationError("fit_linear: need at least 3 points, got " +
                              std::to_string(points.size()));
    }
    const auto n = static_cast<double>(points.size());
    double mx = 0.0;
    double my = 0.0;
    for (const Point2& pt : points) {
        mx += pt.x;
        my += pt.y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const Point2& pt : points) {
        sxx += (pt.x - mx) * (pt.x - mx);
        sxy += (pt.x - mx) * (pt.y - my);
        syy += (pt.y - my) * (pt.y - my);
    }
    if (!(sxx > 0.0)) {
        throw ValidationError("fit_linear: x has zero variance");
    }

    LinearFit fit;
    fit.n = points.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (const Point2& pt : points) {
        const double r = pt.y - (fit.intercept + fit.slope * pt.x);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    const double dof = n - 2.0;
    const double se = std::sqrt(ss_res / dof / sxx);
    if (se == 0.0) {
        fit.p_value = fit.slope == 0.0 ? 1.0 : 0.0;
    } else {
        fit.p_value = student_t_two_sided_p(fit.slope / se, dof);
    }
    return fit;
}

std::vector<RidgePoint> ridge_products(const SweepTable& table, double k_lo, double k_hi) {
    std::vector<RidgePoint> out;
    double best = 0.0;
    // Cells arrive sorted by (k_th, c_th), so each column is contiguous.
    for (const CellSummary& cell : aggregate_cells(table)) {
        if (cell.k_th < k_lo || cell.k_th > k_hi) {
            continue;
        }
        if (out.empty() || out.back().k_th != cell.k_th) {
            out.push_back({cell.k_th, cell.c_th, cell.k_th * cell.c_th});
            best = cell.mean.balance;
        } else if (cell.mean.balance > best) {
            out.back().c_th = cell.c_th;
            out.back().product = cell.k_th * cell.c_th;
            best = cell.mean.balance;
        }
    }
    return out;
}

}  // namespace moralecon
