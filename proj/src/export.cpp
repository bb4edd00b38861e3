#include "moralecon/export.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "moralecon/errors.hpp"

namespace moralecon {

namespace fs = std::filesystem;

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw std::runtime_error("cannot create directory " + path.parent_path().string() +
                                     ": " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_double(const std::string& s, const fs::path& path, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
}

std::string cell_tag(const MoralParams& cell) {
    return "k" + format_number(cell.k_th) + "_c" + format_number(cell.c_th);
}

}  // namespace

fs::path aggregate_path_for(const fs::path& results_path) {
    fs::path agg = results_path;
    agg.replace_filename(results_path.stem().string() + "_agg" + results_path.extension().string());
    return agg;
}

void write_results_csv(const SweepTable& table, const fs::path& path) {
    if (table.empty()) {
        throw ValidationError("write_results_csv: table is empty");
    }
    {
        std::ofstream out = open_out(path);
        out << "k_th,c_th,seed,k_med,u_med,g_k,g_u,balance\n";
        for (const SweepRow& r : table) {
            out << format_number(r.k_th) << ',' << format_number(r.c_th) << ',' << r.seed << ','
                << format_number(r.k_med) << ',' << format_number(r.u_med) << ','
                << format_number(r.g_k) << ',' << format_number(r.g_u) << ','
                << format_number(r.balance) << '\n';
        }
        finish(out, path);
    }

    const fs::path agg_path = aggregate_path_for(path);
    std::ofstream out = open_out(agg_path);
    out << "k_th,c_th,runs,k_med_mean,k_med_sd,u_med_mean,u_med_sd,g_k_mean,g_k_sd,"
           "g_u_mean,g_u_sd,balance_mean,balance_sd\n";
    for (const CellSummary& c : aggregate_cells(table)) {
        out << format_number(c.k_th) << ',' << format_number(c.c_th) << ',' << c.runs << ','
            << format_number(c.mean.k_med) << ',' << format_number(c.stddev.k_med) << ','
            << format_number(c.mean.u_med) << ',' << format_number(c.stddev.u_med) << ','
            << format_number(c.mean.g_k) << ',' << format_number(c.stddev.g_k) << ','
            << format_number(c.mean.g_u) << ',' << format_number(c.stddev.g_u) << ','
            << format_number(c.mean.balance) << ',' << format_number(c.stddev.balance) << '\n';
    }
    finish(out, agg_path);
}

SweepTable read_results_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != "k_th,c_th,seed,k_med,u_med,g_k,g_u,balance") {
        throw ValidationError(path.string() + ": unexpected header, expected "
                              "k_th,c_th,seed,k_med,u_med,g_k,g_u,balance");
    }
    SweepTable table;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 8) {
            throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": expected 8 fields");
        }
        SweepRow r;
        r.k_th = parse_double(f[0], path, lineno);
        r.c_th = parse_double(f[1], path, lineno);
        r.seed = std::stoull(f[2]);
        r.k_med = parse_double(f[3], path, lineno);
        r.u_med = parse_double(f[4], path, lineno);
        r.g_k = parse_double(f[5], path, lineno);
        r.g_u = parse_double(f[6], path, lineno);
        r.balance = parse_double(f[7], path, lineno);
        table.push_back(r);
    }
    return table;
}

std::vector<fs::path> export_histograms(const CellArtifacts& run, const fs::path& dir) {
    std::vector<fs::path> written;
    for (const HistogramSnapshot& snap : run.histograms) {
        const std::array<std::pair<const char*, const Histogram*>, 3> quantities{
            {{"k", &snap.k}, {"c", &snap.c}, {"u", &snap.u}}};
        for (const auto& [name, hist] : quantities) {
            const fs::path path = dir / ("hist_" + cell_tag(run.cell) + "_" + name + "_t" +
                                         format_number(snap.t) + ".csv");
            std::ofstream out = open_out(path);
            out << "bin_lo,bin_hi,count\n";
            const auto bins = static_cast<double>(hist->counts.size());
            const double width = (hist->hi - hist->lo) / bins;
            for (std::size_t b = 0; b < hist->counts.size(); ++b) {
                out << format_number(hist->lo + width * static_cast<double>(b)) << ','
                    << format_number(hist->lo + width * static_cast<double>(b + 1)) << ','
                    << hist->counts[b] << '\n';
            }
            finish(out, path);
            written.push_back(path);
        }
    }
    return written;
}

std::vector<fs::path> export_traces(const CellArtifacts& run, const fs::path& dir) {
    std::map<std::size_t, std::vector<const TraceRow*>> by_agent;
    for (const TraceRow& r : run.traces) {
        by_agent[r.agent].push_back(&r);
    }
    std::vector<fs::path> written;
    for (const auto& [agent, rows] : by_agent) {
        const fs::path path =
            dir / ("trace_" + cell_tag(run.cell) + "_agent" + std::to_string(agent) + ".csv");
        std::ofstream out = open_out(path);
        out << "t,k,c,u\n";
        for (const TraceRow* r : rows) {
            out << format_number(r->t) << ',' << format_number(r->k) << ','
                << format_number(r->c) << ',' << format_number(r->u) << '\n';
        }
        finish(out, path);
        written.push_back(path);
    }
    return written;
}

namespace {

const CellSummary* peak_cell(const std::vector<CellSummary>& cells) {
    const CellSummary* best = nullptr;
    for (const CellSummary& c : cells) {
        if (std::isfinite(c.mean.balance) && (!best || c.mean.balance > best->mean.balance)) {
            best = &c;
        }
    }
    return best;
}

std::string svg_color(double frac) {
    // Dark blue -> teal -> yellow.
    static constexpr std::array<std::array<double, 3>, 4> stops{
        {{{68, 1, 84}}, {{49, 104, 142}}, {{53, 183, 121}}, {{253, 231, 37}}}};
    frac = std::clamp(frac, 0.0, 1.0) * (stops.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(frac), stops.size() - 2);
    const double t = frac - static_cast<double>(i);
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround(stops[i][0] + t * (stops[i + 1][0] - stops[i][0]))),
                  static_cast<int>(std::lround(stops[i][1] + t * (stops[i + 1][1] - stops[i][1]))),
                  static_cast<int>(std::lround(stops[i][2] + t * (stops[i + 1][2] - stops[i][2]))));
    return buf;
}

}  // namespace

std::string balance_contour_svg(const std::vector<CellSummary>& cells) {
    std::vector<double> ks;
    std::vector<double> cs;
    for (const CellSummary& c : cells) {
        ks.push_back(c.k_th);
        cs.push_back(c.c_th);
    }
    std::sort(ks.begin(), ks.end());
    std::sort(cs.begin(), cs.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    const std::size_t nx = ks.size();
    const std::size_t ny = cs.size();

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> grid(nx * ny, nan);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return grid[i * ny + j]; };
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const CellSummary& c : cells) {
        const auto i = static_cast<std::size_t>(std::lower_bound(ks.begin(), ks.end(), c.k_th) - ks.begin());
        const auto j = static_cast<std::size_t>(std::lower_bound(cs.begin(), cs.end(), c.c_th) - cs.begin());
        at(i, j) = c.mean.balance;
        if (std::isfinite(c.mean.balance)) {
            lo = std::min(lo, c.mean.balance);
            hi = std::max(hi, c.mean.balance);
        }
    }

    constexpr double kWidth = 600;
    constexpr double kHeight = 560;
    constexpr double kLeft = 70;
    constexpr double kRight = 30;
    constexpr double kTop = 40;
    constexpr double kBottom = 60;
    const double lx0 = std::log(ks.front());
    const double lx1 = std::log(ks.back());
    const double ly0 = std::log(cs.front());
    const double ly1 = std::log(cs.back());
    auto px = [&](double lx) {
        return lx1 > lx0 ? kLeft + (lx - lx0) / (lx1 - lx0) * (kWidth - kLeft - kRight)
                         : (kWidth + kLeft - kRight) / 2;
    };
    auto py = [&](double ly) {
        return ly1 > ly0 ? kHeight - kBottom - (ly - ly0) / (ly1 - ly0) * (kHeight - kTop - kBottom)
                         : (kHeight + kTop - kBottom) / 2;
    };
    auto edge = [](const std::vector<double>& v, std::size_t i, bool upper) {
        const double l = std::log(v[i]);
        if (upper) {
            return i + 1 < v.size() ? (l + std::log(v[i + 1])) / 2 : l;
        }
        return i > 0 ? (l + std::log(v[i - 1])) / 2 : l;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<title>balance index u_med/g_k</title>\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            const double v = at(i, j);
            const double x0 = px(edge(ks, i, false));
            const double x1 = px(edge(ks, i, true));
            const double y0 = py(edge(cs, j, true));
            const double y1 = py(edge(cs, j, false));
            const std::string fill =
                std::isfinite(v) ? svg_color(hi > lo ? (v - lo) / (hi - lo) : 0.5) : "#cccccc";
            svg << "<rect x=\"" << format_number(x0) << "\" y=\"" << format_number(y0)
                << "\" width=\"" << format_number(std::max(x1 - x0, 1.0)) << "\" height=\""
                << format_number(std::max(y1 - y0, 1.0)) << "\" fill=\"" << fill << "\"/>\n";
        }
    }

    // Iso-lines by marching squares between grid nodes.
    constexpr int kLevels = 8;
    if (nx > 1 && ny > 1 && hi > lo) {
        svg << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
        for (int l = 1; l <= kLevels; ++l) {
            const double level = lo + (hi - lo) * l / (kLevels + 1);
            for (std::size_t i = 0; i + 1 < nx; ++i) {
                for (std::size_t j = 0; j + 1 < ny; ++j) {
                    const std::array<std::pair<std::size_t, std::size_t>, 4> corner{
                        {{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}}};
                    std::array<double, 4> v{};
                    bool usable = true;
                    for (std::size_t q = 0; q < 4; ++q) {
                        v[q] = at(corner[q].first, corner[q].second);
                        usable = usable && std::isfinite(v[q]);
                    }
                    if (!usable) {
                        continue;
                    }
                    std::vector<std::pair<double, double>> hits;
                    for (std::size_t q = 0; q < 4; ++q) {
                        const std::size_t r = (q + 1) % 4;
                        const double a = v[q] - level;
                        const double b = v[r] - level;
                        if ((a < 0) == (b < 0)) {
                            continue;
                        }
                        const double t = a / (a - b);
                        const double lxa = std::log(ks[corner[q].first]);
                        const double lya = std::log(cs[corner[q].second]);
                        const double lxb = std::log(ks[corner[r].first]);
                        const double lyb = std::log(cs[corner[r].second]);
                        hits.emplace_back(px(lxa + t * (lxb - lxa)), py(lya + t * (lyb - lya)));
                    }
                    for (std::size_t h = 0; h + 1 < hits.size(); h += 2) {
                        svg << "<line x1=\"" << format_number(hits[h].first) << "\" y1=\""
                            << format_number(hits[h].second) << "\" x2=\""
                            << format_number(hits[h + 1].first) << "\" y2=\""
                            << format_number(hits[h + 1].second) << "\"/>\n";
                    }
                }
            }
        }
        svg << "</g>\n";
    }

    if (const CellSummary* peak = peak_cell(cells)) {
        const double x = px(std::log(peak->k_th));
        const double y = py(std::log(peak->c_th));
        svg << "<g stroke=\"red\" stroke-width=\"3\">"
            << "<line x1=\"" << format_number(x - 8) << "\" y1=\"" << format_number(y - 8)
            << "\" x2=\"" << format_number(x + 8) << "\" y2=\"" << format_number(y + 8) << "\"/>"
            << "<line x1=\"" << format_number(x - 8) << "\" y1=\"" << format_number(y + 8)
            << "\" x2=\"" << format_number(x + 8) << "\" y2=\"" << format_number(y - 8) << "\"/>"
            << "</g>\n";
        svg << "<text x=\"" << format_number(kLeft) << "\" y=\"24\">peak " << format_number(peak->mean.balance)
            << " at k_th=" << format_number(peak->k_th) << ", c_th=" << format_number(peak->c_th)
            << "</text>\n";
    }

    for (double k : ks) {
        svg << "<text x=\"" << format_number(px(std::log(k))) << "\" y=\""
            << format_number(kHeight - kBottom + 18) << "\" text-anchor=\"middle\">"
            << format_number(k) << "</text>\n";
    }
    for (double c : cs) {
        svg << "<text x=\"" << format_number(kLeft - 8) << "\" y=\""
            << format_number(py(std::log(c)) + 4) << "\" text-anchor=\"end\">" << format_number(c)
            << "</text>\n";
    }
    svg << "<text x=\"" << format_number((kWidth + kLeft - kRight) / 2) << "\" y=\""
        << format_number(kHeight - 15) << "\" text-anchor=\"middle\">k_th (log scale)</text>\n";
    svg << "<text x=\"18\" y=\"" << format_number((kHeight + kTop - kBottom) / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << format_number((kHeight + kTop - kBottom) / 2) << ")\">c_th (log scale)</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::vector<fs::path> export_surfaces(const SweepTable& table, const fs::path& dir, bool svg) {
    const std::vector<CellSummary> cells = aggregate_cells(table);
    const CellSummary* peak = peak_cell(cells);
    std::vector<fs::path> written;

    const std::array<std::pair<const char*, double SweepRow::*>, 5> surfaces{{
        {"k_med", &SweepRow::k_med},
        {"u_med", &SweepRow::u_med},
        {"g_k", &SweepRow::g_k},
        {"g_u", &SweepRow::g_u},
        {"balance", &SweepRow::balance},
    }};
    for (const auto& [name, field] : surfaces) {
        const bool is_balance = field == &SweepRow::balance;
        const fs::path path = dir / (std::string("surface_") + name + ".csv");
        std::ofstream out = open_out(path);
        out << "k_th,c_th,runs,mean,sd" << (is_balance ? ",peak" : "") << '\n';
        for (const CellSummary& c : cells) {
            out << format_number(c.k_th) << ',' << format_number(c.c_th) << ',' << c.runs << ','
                << format_number(c.mean.*field) << ',' << format_number(c.stddev.*field);
            if (is_balance) {
                out << ',' << (&c == peak ? 1 : 0);
            }
            out << '\n';
        }
        finish(out, path);
        written.push_back(path);
    }

    const fs::path scatter = dir / "scatter_gk_umed.csv";
    {
        std::ofstream out = open_out(scatter);
        out << "k_th,c_th,g_k,u_med\n";
        for (const CellSummary& c : cells) {
            out << format_number(c.k_th) << ',' << format_number(c.c_th) << ','
                << format_number(c.mean.g_k) << ',' << format_number(c.mean.u_med) << '\n';
        }
        finish(out, scatter);
        written.push_back(scatter);
    }

    if (svg) {
        const fs::path path = dir / "balance_contour.svg";
        std::ofstream out = open_out(path);
        out << balance_contour_svg(cells);
        finish(out, path);
        written.push_back(path);
    }
    return written;
}

std::vector<fs::path> export_figures_data(const SweepOutcome& outcome, const OutputOptions& options) {
    std::vector<fs::path> written;
    auto append = [&written](std::vector<fs::path> more) {
        written.insert(written.end(), more.begin(), more.end());
    };
    for (const CellArtifacts& run : outcome.artifacts) {
        if (options.histograms) {
            append(export_histograms(run, options.dir / "histograms"));
        }
        if (options.traces) {
            append(export_traces(run, options.dir / "traces"));
        }
    }
    if (options.surfaces && !outcome.table.empty()) {
        append(export_surfaces(outcome.table, options.dir / "surfaces", options.svg));
    }
    return written;
}

FitReport compute_fits(const SweepTable& table, double ridge_k_lo, double ridge_k_hi) {
    FitReport report;
    const std::vector<CellSummary> cells = aggregate_cells(table);
    try {
        report.gauss = fit_gauss_surface(table);
    } catch (const FitError& e) {
        report.gauss_error = e.what();
    }
    std::vector<Point2> points;
    for (const CellSummary& c : cells) {
        points.push_back({c.mean.g_k, c.mean.u_med});
    }
    report.linear = fit_linear(points);
    report.ridge = ridge_products(table, ridge_k_lo, ridge_k_hi);
    if (const CellSummary* peak = peak_cell(cells)) {
        report.peak = *peak;
    }
    return report;
}

std::vector<fs::path> write_fit_report(const FitReport& report, const fs::path& dir) {
    const fs::path txt = dir / "fit_report.txt";
    const fs::path csv = dir / "fit_report.csv";
    {
        std::ofstream out = open_out(txt);
        out << "Balance surface  u_med/g_k ~ A exp(-p (ln k_th - b)^2 - q (ln c_th - d)^2) + B\n";
        if (report.gauss) {
            const GaussSurfaceFit& g = *report.gauss;
            out << "  A  = " << format_number(g.amplitude) << '\n'
                << "  B  = " << format_number(g.offset) << '\n'
                << "  b  = " << format_number(g.x_center) << "  (k_th = "
                << format_number(std::exp(g.x_center)) << ")\n"
                << "  d  = " << format_number(g.y_center) << "  (c_th = "
                << format_number(std::exp(g.y_center)) << ")\n"
                << "  p  = " << format_number(g.x_curvature) << '\n'
                << "  q  = " << format_number(g.y_curvature) << '\n'
                << "  R^2 = " << format_number(g.r_squared) << "  (" << g.iterations
                << " iterations)\n";
        } else {
            out << "  did not converge: " << report.gauss_error << '\n';
        }
        out << "\nInequality vs utility  u_med = intercept + slope * g_k\n"
            << "  slope     = " << format_number(report.linear.slope) << '\n'
            << "  intercept = " << format_number(report.linear.intercept) << '\n'
            << "  p-value   = " << format_number(report.linear.p_value) << '\n'
            << "  R^2       = " << format_number(report.linear.r_squared) << '\n'
            << "  n         = " << report.linear.n << '\n';
        out << "\nBalance peak: " << format_number(report.peak.mean.balance) << " at k_th = "
            << format_number(report.peak.k_th) << ", c_th = " << format_number(report.peak.c_th)
            << '\n';
        out << "\nRidge (argmax c_th per k_th column)\n";
        for (const RidgePoint& r : report.ridge) {
            out << "  k_th = " << format_number(r.k_th) << "  c_th = " << format_number(r.c_th)
                << "  product = " << format_number(r.product) << '\n';
        }
        finish(out, txt);
    }
    {
        std::ofstream out = open_out(csv);
        out << "quantity,value\n";
        if (report.gauss) {
            const GaussSurfaceFit& g = *report.gauss;
            out << "gauss.amplitude," << format_number(g.amplitude) << '\n'
                << "gauss.offset," << format_number(g.offset) << '\n'
                << "gauss.x_center," << format_number(g.x_center) << '\n'
                << "gauss.y_center," << format_number(g.y_center) << '\n'
                << "gauss.x_curvature," << format_number(g.x_curvature) << '\n'
                << "gauss.y_curvature," << format_number(g.y_curvature) << '\n'
                << "gauss.r_squared," << format_number(g.r_squared) << '\n';
        } else {
            out << "gauss.converged,0\n";
        }
        out << "linear.slope," << format_number(report.linear.slope) << '\n'
            << "linear.intercept," << format_number(report.linear.intercept) << '\n'
            << "linear.p_value," << format_number(report.linear.p_value) << '\n'
            << "linear.r_squared," << format_number(report.linear.r_squared) << '\n'
            << "peak.k_th," << format_number(report.peak.k_th) << '\n'
            << "peak.c_th," << format_number(report.peak.c_th) << '\n'
            << "peak.balance," << format_number(report.peak.mean.balance) << '\n';
        for (const RidgePoint& r : report.ridge) {
            out << "ridge[" << format_number(r.k_th) << "].c_th," << format_number(r.c_th) << '\n'
                << "ridge[" << format_number(r.k_th) << "].product," << format_number(r.product)
                << '\n';
        }
        finish(out, csv);
    }
    return {txt, csv};
}

namespace {

int decimals_of(const std::string& s) {
    const auto dot = s.find('.');
    return dot == std::string::npos ? 0 : static_cast<int>(s.size() - dot - 1);
}

}  // namespace

std::vector<ReferenceRow> load_reference_table(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != "k_th,c_th,k_med,u_med,g_k,g_u,balance") {
        throw ValidationError(path.string() +
                              ": expected header k_th,c_th,k_med,u_med,g_k,g_u,balance");
    }
    std::vector<ReferenceRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 7) {
            throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                  ": expected 7 fields");
        }
        ReferenceRow r;
        r.row.k_th = parse_double(f[0], path, lineno);
        r.row.c_th = parse_double(f[1], path, lineno);
        r.row.k_med = parse_double(f[2], path, lineno);
        r.row.u_med = parse_double(f[3], path, lineno);
        r.row.g_k = parse_double(f[4], path, lineno);
        r.row.g_u = parse_double(f[5], path, lineno);
        r.row.balance = parse_double(f[6], path, lineno);
        r.u_med_decimals = decimals_of(f[3]);
        r.g_k_decimals = decimals_of(f[4]);
        r.balance_decimals = decimals_of(f[6]);
        rows.push_back(r);
    }
    return rows;
}

ReferenceCheck check_reference_balance(const std::vector<ReferenceRow>& rows, double tolerance) {
    ReferenceCheck check;
    check.rows = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SweepRow& r = rows[i].row;
        const double ratio = r.u_med / r.g_k;
        const double dev = std::fabs(ratio - r.balance);
        check.max_abs_deviation = std::max(check.max_abs_deviation, dev);
        if (dev <= tolerance) {
            continue;
        }
        check.over_tolerance.push_back(i);
        const double hu = 0.5 * std::pow(10.0, -rows[i].u_med_decimals);
        const double hg = 0.5 * std::pow(10.0, -rows[i].g_k_decimals);
        const double hb = 0.5 * std::pow(10.0, -rows[i].balance_decimals);
        const double ratio_lo = (r.u_med - hu) / (r.g_k + hg);
        const double ratio_hi = (r.u_med + hu) / (r.g_k - hg);
        if (ratio_hi < r.balance - hb || ratio_lo > r.balance + hb) {
            check.inconsistent.push_back(i);
        }
    }
    return check;
}

}  // namespace moralecon
