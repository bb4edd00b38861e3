#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "moralecon/econ_core.hpp"
#include "moralecon/engine.hpp"
#include "moralecon/errors.hpp"

using namespace moralecon;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ModelConfig small_config(int agents = 200, double years = 20.0) {
    ModelConfig cfg;
    cfg.schedule.agents = agents;
    cfg.schedule.horizon_years = years;
    cfg.business.pairs = std::min(17, agents / 2);
    return cfg;
}

ModelConfig quiet_config(int agents, double years) {
    ModelConfig cfg = small_config(agents, years);
    cfg.business.pairs = 0;
    return cfg;
}

}  // namespace

TEST_CASE("initial population sits at the saddle point") {
    const ModelConfig cfg;
    Simulation sim(cfg, {100.0, 100.0});
    REQUIRE(sim.size() == 1000);
    const SaddlePoint s0 = initial_saddle(cfg.economy);
    for (std::size_t i = 0; i < sim.size(); ++i) {
        CHECK(sim.capital()[i] == s0.k_star);
        CHECK(sim.consumption()[i] == s0.c_star);
        CHECK(sim.utility()[i] == 0.0);
    }
    CHECK(std::fabs(sim.capital()[0] - 2.39) < 0.01);
    CHECK(std::fabs(sim.consumption()[0] - 1.31) < 0.01);

    ModelConfig two = quiet_config(2, 10.0);
    two.business.pairs = 1;
    Simulation pair(two, {1.0, 1.0});
    CHECK(pair.capital()[0] == pair.capital()[1]);
    CHECK(pair.consumption()[0] == pair.consumption()[1]);
}

TEST_CASE("same seed gives identical state") {
    const ModelConfig cfg = small_config();
    Simulation a(cfg, {1.7, 5.5});
    Simulation b(cfg, {1.7, 5.5});
    for (int d = 0; d < 800; ++d) {
        a.step();
        b.step();
    }
    CHECK(std::equal(a.capital().begin(), a.capital().end(), b.capital().begin()));
    CHECK(std::equal(a.consumption().begin(), a.consumption().end(), b.consumption().begin()));
    CHECK(std::equal(a.utility().begin(), a.utility().end(), b.utility().begin()));

    ModelConfig other = cfg;
    other.schedule.seed = 2;
    Simulation c(other, {1.7, 5.5});
    for (int d = 0; d < 800; ++d) {
        c.step();
    }
    CHECK_FALSE(std::equal(a.capital().begin(), a.capital().end(), c.capital().begin()));
}

TEST_CASE("one quiet day accrues discounted felicity") {
    const ModelConfig cfg = quiet_config(10, 10.0);
    Simulation sim(cfg, {kInf, 100.0});
    const double c0 = sim.consumption()[0];
    const AgentState before = sim.agent(0);
    sim.step();
    CHECK(sim.consumption()[0] == doctest::Approx(c0).epsilon(1e-15));
    const double expected =
        std::exp(-before.path.beta * kDayLength) * std::sqrt(c0) / 0.5 * kDayLength;
    CHECK(sim.utility()[0] == doctest::Approx(expected).epsilon(1e-13));
    CHECK(expected == doctest::Approx(utility_increment(c0, 0.5, before.path.beta, kDayLength, 0.0,
                                                        kDayLength)).epsilon(1e-13));
}

TEST_CASE("redistribution schedule") {
    ModelConfig cfg = quiet_config(10, 100.0);
    SUBCASE("offset-period timing fires at years 5, 15, ..., 95") {
        cfg.redistribution.timing = RedistTiming::kOffsetPeriod;
        Simulation sim(cfg, {1.0, 1.0});
        CHECK(sim.redistribution_due(1825));
        CHECK(sim.redistribution_due(5475));
        CHECK(sim.redistribution_due(34675));
        CHECK_FALSE(sim.redistribution_due(3650));
        CHECK_FALSE(sim.redistribution_due(1824));
        int events = 0;
        for (long d = 1; d <= 36500; ++d) {
            events += sim.redistribution_due(d);
        }
        CHECK(events == 10);
    }
    SUBCASE("extended-period timing fires at years 15, 30, ..., 90") {
        cfg.redistribution.timing = RedistTiming::kExtendedPeriod;
        Simulation sim(cfg, {1.0, 1.0});
        CHECK_FALSE(sim.redistribution_due(1825));
        CHECK(sim.redistribution_due(5475));
        CHECK(sim.redistribution_due(32850));
        int events = 0;
        for (long d = 1; d <= 36500; ++d) {
            events += sim.redistribution_due(d);
        }
        CHECK(events == 6);
    }
}

TEST_CASE("injected joint business re-anchors both partners") {
    ModelConfig cfg = quiet_config(4, 10.0);
    cfg.business.pairs = 1;
    Simulation sim(cfg, {100.0, 100.0});
    const double k0 = sim.capital()[0];
    const double c0 = sim.consumption()[0];
    const AgentPair pair{0, 1};
    const double eps = 0.1;
    sim.step({&pair, 1}, {&eps, 1});
    for (std::size_t i : {0u, 1u}) {
        const AgentState s = sim.agent(i);
        CHECK(s.k_a_star == doctest::Approx(1.075 * k0).epsilon(1e-14));
        CHECK(s.path.c_origin == c0);
        CHECK(s.path.t_event == doctest::Approx(kDayLength).epsilon(1e-15));
        CHECK(saddle_capital(cfg.economy, s.gamma_a) == doctest::Approx(s.k_a_star).epsilon(1e-9));
        // zero elapsed time on the event day: still at the path origin
        CHECK(s.c == c0);
        CHECK(s.c < s.c_a_star);
    }
    CHECK(sim.agent(2).k_a_star == k0);

    sim.step({}, {});
    CHECK(sim.consumption()[0] > c0);
    CHECK(sim.consumption()[0] < sim.agent(0).c_a_star);
}

TEST_CASE("injected pairs are validated") {
    ModelConfig cfg = quiet_config(4, 10.0);
    cfg.business.pairs = 1;
    Simulation sim(cfg, {100.0, 100.0});
    const double eps[2] = {0.1, 0.1};
    const AgentPair self[1] = {{2, 2}};
    CHECK_THROWS_AS(sim.step(self, {eps, 1}), ValidationError);
    const AgentPair out_of_range[1] = {{0, 4}};
    CHECK_THROWS_AS(sim.step(out_of_range, {eps, 1}), ValidationError);
    const AgentPair overlap[2] = {{0, 1}, {1, 2}};
    CHECK_THROWS_AS(sim.step(overlap, eps), ValidationError);
    const AgentPair one[1] = {{0, 1}};
    CHECK_THROWS_AS(sim.step(one, eps), ValidationError);
    CHECK(sim.day() == 0);
}

TEST_CASE("capital wiped out by a loss fails fast with day and agent") {
    ModelConfig cfg = quiet_config(4, 10.0);
    cfg.business.pairs = 1;
    cfg.business.savings_rate = 0.0;
    Simulation sim(cfg, {100.0, 100.0});
    const AgentPair pair{2, 3};
    const double eps = -1.0;
    try {
        sim.step({&pair, 1}, {&eps, 1});
        FAIL("no error raised");
    } catch (const SimulationError& e) {
        CHECK(e.day() == 1);
        CHECK(e.agent() == 2);
    }
}

TEST_CASE("event-free run matches the closed-form utility") {
    const ModelConfig cfg = quiet_config(50, 100.0);
    const RunResult r = run(cfg, {kInf, 100.0});
    const SaddlePoint s0 = initial_saddle(cfg.economy);
    const double beta = adjustment_speed(cfg.economy, s0.k_star, s0.c_star, s0.gamma).beta;
    const double closed = (1.0 - std::exp(-beta * 100.0)) / beta * std::sqrt(s0.c_star) / 0.5;
    CHECK(closed == doctest::Approx(10.25).epsilon(0.005));
    for (std::size_t i = 0; i < r.final_u.size(); ++i) {
        CHECK(std::fabs(r.final_u[i] - closed) / closed < 0.005);
        CHECK(std::fabs(r.final_k[i] - s0.k_star) < 1e-12);
        CHECK(std::fabs(r.final_c[i] - s0.c_star) < 1e-12);
    }
    CHECK(r.g_k == 0.0);
    CHECK(r.balance == kInf);
}

TEST_CASE("step-level invariants on a busy population") {
    // Roughly the baseline event rate per agent.
    ModelConfig cfg = small_config(100, 40.0);
    cfg.business.pairs = 2;
    Simulation sim(cfg, {1.7, 1.0});
    std::vector<double> prev_u(sim.size(), 0.0);
    for (long d = 1; d <= cfg.schedule.horizon_days(); ++d) {
        sim.step();
        for (std::size_t i = 0; i < sim.size(); ++i) {
            REQUIRE(sim.capital()[i] > 0.0);
            REQUIRE(sim.consumption()[i] > 0.0);
            REQUIRE(sim.utility()[i] >= prev_u[i]);
            prev_u[i] = sim.utility()[i];
            const AgentState s = sim.agent(i);
            if (s.path.t_event == sim.time()) {
                REQUIRE(saddle_capital(cfg.economy, s.gamma_a) ==
                        doctest::Approx(s.k_a_star).epsilon(1e-9));
            }
            // A capped path approaches c_th monotonically from its origin.
            if (s.c_a_star > 1.0) {
                if (s.path.c_origin <= 1.0) {
                    REQUIRE(s.c <= 1.0 + 1e-9);
                } else {
                    REQUIRE(s.c >= 1.0 - 1e-9);
                }
            }
        }
    }
}

TEST_CASE("traces and histograms") {
    const ModelConfig cfg = quiet_config(20, 100.0);
    TraceConfig trace;
    trace.agents = {0, 7};
    trace.cadence_days = 365;
    trace.histogram_years = {0.0, 1.0, 30.0, 100.0};
    trace.histogram_bins = 8;
    const RunResult r = run(cfg, {kInf, 100.0}, trace);
    CHECK(r.traces.size() == 200);
    double prev_u = -1.0;
    for (const TraceRow& row : r.traces) {
        if (row.agent != 0) {
            continue;
        }
        CHECK(row.k == r.traces.front().k);
        CHECK(row.u > prev_u);
        prev_u = row.u;
    }
    CHECK(r.traces.back().t == doctest::Approx(100.0));

    REQUIRE(r.histograms.size() == 4);
    CHECK(r.histograms[2].t == doctest::Approx(30.0));
    for (const HistogramSnapshot& h : r.histograms) {
        for (const Histogram* q : {&h.k, &h.c, &h.u}) {
            const auto nonzero = std::count_if(q->counts.begin(), q->counts.end(),
                                               [](long c) { return c > 0; });
            CHECK(nonzero == 1);
        }
    }

    TraceConfig bad;
    bad.agents = {20};
    CHECK_THROWS_AS(run(cfg, {kInf, 100.0}, bad), ValidationError);
}

TEST_CASE("histogram binning") {
    const std::vector<double> v{0.0, 0.5, 1.0, 1.5, 2.0};
    const Histogram h = make_histogram(v, 4);
    CHECK(h.lo == 0.0);
    CHECK(h.hi == 2.0);
    CHECK(h.counts == std::vector<long>{1, 1, 1, 2});
    CHECK_THROWS_AS(make_histogram(v, 0), ValidationError);
}

TEST_CASE("run results are reproducible") {
    const ModelConfig cfg = small_config(150, 16.0);
    const RunResult a = run(cfg, {1.7, 5.5});
    const RunResult b = run(cfg, {1.7, 5.5});
    CHECK(a.final_k == b.final_k);
    CHECK(a.final_c == b.final_c);
    CHECK(a.final_u == b.final_u);
    CHECK(a.g_k == b.g_k);
    CHECK(a.g_k > 0.0);
    CHECK(a.balance == doctest::Approx(a.u_med / a.g_k).epsilon(1e-15));
}

TEST_CASE("configuration validation") {
    ModelConfig cfg;
    cfg.schedule.agents = 1;
    CHECK_THROWS_AS(Simulation(cfg, {1.0, 1.0}), ValidationError);

    cfg = ModelConfig{};
    cfg.business.pairs = 501;
    CHECK_THROWS_AS(Simulation(cfg, {1.0, 1.0}), ValidationError);

    cfg = ModelConfig{};
    CHECK_THROWS_AS(Simulation(cfg, {0.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(Simulation(cfg, {1.0, -1.0}), ValidationError);

    cfg.economy.theta = 1.0;
    CHECK_THROWS_AS(Simulation(cfg, {1.0, 1.0}), ValidationError);
}
