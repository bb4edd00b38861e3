#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "moralecon/errors.hpp"
#include "moralecon/export.hpp"
#include "moralecon/sweep.hpp"

#ifndef MORALECON_TEST_DATA
#define MORALECON_TEST_DATA "data"
#endif
#ifndef MORALECON_TEST_CONFIGS
#define MORALECON_TEST_CONFIGS "configs"
#endif

using namespace moralecon;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / ("moralecon_test_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

SweepConfig tiny_config() {
    SweepConfig cfg = baseline_config();
    cfg.model.schedule.agents = 60;
    cfg.model.schedule.horizon_years = 16.0;
    cfg.k_th_grid = {10.0, 1.7};
    cfg.c_th_grid = {5.5, 1.0};
    cfg.seeds = {2, 1};
    cfg.outputs.figure_cells = {{1.7, 5.5}};
    cfg.outputs.histogram_years = {1.0, 8.0, 16.0};
    return cfg;
}

std::string expect_validation_error(const std::string& json) {
    try {
        parse_config_text(json);
    } catch (const ValidationError& e) {
        return e.what();
    }
    FAIL("config accepted: " << json);
    return {};
}

}  // namespace

TEST_CASE("baseline preset") {
    const SweepConfig cfg = parse_config("baseline");
    CHECK(cfg.k_th_grid == baseline_grid());
    CHECK(cfg.c_th_grid == baseline_grid());
    CHECK(cfg.k_th_grid.size() * cfg.c_th_grid.size() == 81);
    CHECK(cfg.seeds.size() == 10);
    CHECK(cfg.seeds.front() == 1);
    CHECK(cfg.seeds.back() == 10);
    CHECK(cfg.model.schedule.agents == 1000);
    CHECK(cfg.model.business.pairs == 17);
    CHECK(std::fabs(cfg.model.economy.rho - 0.2231) < 1e-4);
    CHECK(std::fabs(rho_from_time_preference(0.8) - 0.2231) < 1e-4);
    CHECK_THROWS_AS(rho_from_time_preference(1.0), ValidationError);
}

TEST_CASE("shipped config equals the preset") {
    const SweepConfig file = parse_config(std::string(MORALECON_TEST_CONFIGS) + "/baseline.json");
    const SweepConfig preset = baseline_config();
    CHECK(file.k_th_grid == preset.k_th_grid);
    CHECK(file.c_th_grid == preset.c_th_grid);
    CHECK(file.seeds == preset.seeds);
    CHECK(file.model.economy.rho == preset.model.economy.rho);
    CHECK(file.model.economy.alpha == preset.model.economy.alpha);
    CHECK(file.model.business.savings_rate == preset.model.business.savings_rate);
    CHECK(file.model.redistribution.timing == preset.model.redistribution.timing);
    CHECK(file.model.capital_drift == preset.model.capital_drift);
    CHECK(file.outputs.histogram_years == preset.outputs.histogram_years);
    CHECK(file.outputs.figure_cells.size() == 2);
}

TEST_CASE("config errors name the field") {
    CHECK(expect_validation_error(R"({"economy": {"theta": 1.0}})").find("singular") !=
          std::string::npos);
    CHECK(expect_validation_error(R"({"economy": {"bogus": 1}})").find("economy.bogus") !=
          std::string::npos);
    CHECK(expect_validation_error(R"({"colour": "red"})").find("colour") != std::string::npos);
    CHECK(expect_validation_error(R"({"schedule": {"agents": "many"}})").find("schedule.agents") !=
          std::string::npos);
    CHECK(expect_validation_error(R"({"economy": {"rho": 0.2, "time_preference": 0.8}})")
              .find("not both") != std::string::npos);
    CHECK(expect_validation_error(R"({"grid": {"k_th": []}})").find("grid") != std::string::npos);
    CHECK(expect_validation_error(R"({"grid": {"k_th": [1, -2]}})").find("k_th") !=
          std::string::npos);
    CHECK(expect_validation_error(R"({"seeds": [-1]})").find("seeds[0]") != std::string::npos);
    CHECK(expect_validation_error(R"({"redistribution": {"timing": "sometimes"}})")
              .find("redistribution.timing") != std::string::npos);
    CHECK(expect_validation_error(R"({"outputs": {"figure_cells": [[1]]}})")
              .find("outputs.figure_cells[0]") != std::string::npos);
    CHECK(expect_validation_error("{not json").find("invalid JSON") != std::string::npos);
    CHECK_THROWS_AS(parse_config("/nonexistent/config.json"), ValidationError);
}

TEST_CASE("config overrides") {
    const SweepConfig cfg = parse_config_text(R"({
        "economy": {"time_preference": 0.9},
        "redistribution": {"timing": "offset-period"},
        "capital_drift": "accumulate",
        "grid": {"k_th": [2], "c_th": [3, 4]},
        "seeds": [7],
        "outputs": {"dir": "elsewhere", "trace_agents": [], "ridge_k_range": [1, 3]}
    })");
    CHECK(cfg.model.economy.rho == doctest::Approx(std::log(1.0 / 0.9)));
    CHECK(cfg.model.redistribution.timing == RedistTiming::kOffsetPeriod);
    CHECK(cfg.model.capital_drift == CapitalDrift::kAccumulate);
    CHECK(cfg.c_th_grid == std::vector<double>{3, 4});
    CHECK(cfg.seeds == std::vector<std::uint64_t>{7});
    CHECK(cfg.outputs.dir == fs::path("elsewhere"));
    CHECK(cfg.outputs.trace_agents.empty());
    CHECK(cfg.outputs.ridge_k_lo == 1.0);
    CHECK(cfg.model.schedule.agents == 1000);
}

TEST_CASE("seed lists") {
    CHECK(parse_seed_list("1-10").size() == 10);
    CHECK(parse_seed_list("3,1,7") == std::vector<std::uint64_t>{3, 1, 7});
    CHECK(parse_seed_list("1-3,9") == std::vector<std::uint64_t>{1, 2, 3, 9});
    CHECK_THROWS_AS(parse_seed_list("5-2"), ValidationError);
    CHECK_THROWS_AS(parse_seed_list("x"), ValidationError);
    CHECK_THROWS_AS(parse_seed_list(""), ValidationError);
}

TEST_CASE("sweep rows come out in lexical order") {
    const SweepOutcome out = run_sweep(tiny_config(), 2);
    REQUIRE(out.table.size() == 8);
    CHECK(out.table[0].k_th == 1.7);
    CHECK(out.table[0].c_th == 1.0);
    CHECK(out.table[0].seed == 1);
    CHECK(out.table[1].seed == 2);
    CHECK(out.table[2].c_th == 5.5);
    CHECK(out.table[7].k_th == 10.0);
    CHECK(out.timings.size() == 8);
    REQUIRE(out.artifacts.size() == 1);
    CHECK(out.artifacts[0].cell.k_th == 1.7);
    CHECK(out.artifacts[0].seed == 1);
    CHECK(out.artifacts[0].histograms.size() == 3);
    CHECK(out.artifacts[0].traces.size() == 3 * 16);
}

TEST_CASE("sweep results do not depend on the thread count") {
    TempDir dir("threads");
    const SweepConfig cfg = tiny_config();
    write_results_csv(run_sweep(cfg, 1).table, dir.path / "one.csv");
    write_results_csv(run_sweep(cfg, 8).table, dir.path / "eight.csv");
    CHECK(slurp(dir.path / "one.csv") == slurp(dir.path / "eight.csv"));
    CHECK(slurp(dir.path / "one_agg.csv") == slurp(dir.path / "eight_agg.csv"));
}

TEST_CASE("a failing cell aborts the sweep with its coordinates") {
    SweepConfig cfg = tiny_config();
    cfg.model.business.savings_rate = 0.0;
    cfg.model.business.profit_width = 3.0;
    try {
        run_sweep(cfg, 2);
        FAIL("sweep did not fail");
    } catch (const CellFailure& e) {
        const std::string msg = e.what();
        CHECK(msg.find("k_th=1.7") != std::string::npos);
        CHECK(msg.find("c_th=1") != std::string::npos);
        CHECK(msg.find("seed=1") != std::string::npos);
        CHECK(msg.find("day ") != std::string::npos);
    }
}

TEST_CASE("results csv") {
    TempDir dir("csv");
    SweepTable one{{1.7, 5.5, 3, 2.0391234567, 218.4, 0.2805, 0.0301, 778.6}};
    write_results_csv(one, dir.path / "r.csv");
    const std::string text = slurp(dir.path / "r.csv");
    CHECK(text ==
          "k_th,c_th,seed,k_med,u_med,g_k,g_u,balance\n1.7,5.5,3,2.03912,218.4,0.2805,0.0301,778.6\n");
    CHECK(text.find('\r') == std::string::npos);
    CHECK(fs::exists(dir.path / "r_agg.csv"));

    const SweepOutcome out = run_sweep(tiny_config(), 1);
    write_results_csv(out.table, dir.path / "s.csv");
    const SweepTable back = read_results_csv(dir.path / "s.csv");
    REQUIRE(back.size() == out.table.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].seed == out.table[i].seed);
        CHECK(back[i].k_th == out.table[i].k_th);
        CHECK(back[i].g_k == doctest::Approx(out.table[i].g_k).epsilon(5e-6));
        CHECK(back[i].u_med == doctest::Approx(out.table[i].u_med).epsilon(5e-6));
        CHECK(back[i].balance == doctest::Approx(out.table[i].balance).epsilon(5e-6));
    }

    CHECK_THROWS_AS(write_results_csv({}, dir.path / "empty.csv"), ValidationError);
    CHECK_THROWS_AS(write_results_csv(one, "/proc/moralecon/r.csv"), std::runtime_error);
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(1234567.0) == "1.23457e+06");
}

TEST_CASE("figure data export") {
    TempDir dir("figures");
    SweepConfig cfg = tiny_config();
    cfg.outputs.dir = dir.path;
    const SweepOutcome out = run_sweep(cfg, 2);
    const auto files = export_figures_data(out, cfg.outputs);

    int hist = 0;
    int traces = 0;
    for (const fs::path& p : files) {
        CHECK(fs::exists(p));
        hist += p.parent_path().filename() == "histograms";
        traces += p.parent_path().filename() == "traces";
    }
    CHECK(hist == 9);
    CHECK(traces == 3);
    CHECK(fs::exists(dir.path / "histograms" / "hist_k1.7_c5.5_k_t1.csv"));
    CHECK(slurp(dir.path / "traces" / "trace_k1.7_c5.5_agent0.csv").rfind("t,k,c,u\n", 0) == 0);

    const std::string balance = slurp(dir.path / "surfaces" / "surface_balance.csv");
    CHECK(balance.rfind("k_th,c_th,runs,mean,sd,peak\n", 0) == 0);
    int peaks = 0;
    for (std::size_t pos = 0; (pos = balance.find(",1\n", pos)) != std::string::npos; ++pos) {
        ++peaks;
    }
    CHECK(peaks == 1);
    CHECK(fs::exists(dir.path / "surfaces" / "scatter_gk_umed.csv"));
    const std::string svg = slurp(dir.path / "surfaces" / "balance_contour.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("peak") != std::string::npos);

    SUBCASE("empty trace selection writes no traces") {
        TempDir quiet("figures_quiet");
        SweepConfig c2 = tiny_config();
        c2.outputs.dir = quiet.path;
        c2.outputs.trace_agents.clear();
        c2.outputs.traces = false;
        const SweepOutcome o2 = run_sweep(c2, 1);
        export_figures_data(o2, c2.outputs);
        CHECK_FALSE(fs::exists(quiet.path / "traces"));
        CHECK(fs::exists(quiet.path / "histograms"));
    }
}

TEST_CASE("reference table check") {
    const auto rows = load_reference_table(fs::path(MORALECON_TEST_DATA) / "table_s1.csv");
    REQUIRE(rows.size() == 81);
    CHECK(rows[0].u_med_decimals == 1);
    CHECK(rows[0].g_k_decimals == 4);
    const ReferenceCheck check = check_reference_balance(rows);
    CHECK(check.consistent());
    CHECK(check.over_tolerance.size() == 1);
    CHECK(check.max_abs_deviation < 0.25);

    auto broken = rows;
    broken[10].row.balance += 5.0;
    const ReferenceCheck bad = check_reference_balance(broken);
    CHECK_FALSE(bad.consistent());
    CHECK(bad.inconsistent == std::vector<std::size_t>{10});
}

TEST_CASE("fit report") {
    TempDir dir("fits");
    SweepTable t;
    for (const ReferenceRow& r : load_reference_table(fs::path(MORALECON_TEST_DATA) / "table_s1.csv")) {
        t.push_back(r.row);
    }
    const FitReport report = compute_fits(t, 1.7, 10.0);
    REQUIRE(report.gauss.has_value());
    CHECK(report.linear.slope < 0.0);
    CHECK(report.peak.k_th == 1.7);
    CHECK(report.peak.c_th == 5.5);
    CHECK(report.ridge.size() == 4);
    write_fit_report(report, dir.path);
    const std::string csv = slurp(dir.path / "fit_report.csv");
    CHECK(csv.find("gauss.r_squared,0.916") != std::string::npos);
    CHECK(csv.find("linear.slope,-86.6156") != std::string::npos);
    CHECK(fs::exists(dir.path / "fit_report.txt"));
}
