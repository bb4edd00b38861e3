#include "moralecon/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "moralecon/errors.hpp"

namespace moralecon {

double rho_from_time_preference(double phi) {
    if (!(phi > 0.0 && phi < 1.0)) {
        throw ValidationError("economy.time_preference must lie in (0, 1), got " +
                              std::to_string(phi));
    }
    return std::log(1.0 / phi);
}

std::vector<double> baseline_grid() { return {1.0, 1.7, 3.0, 5.5, 10.0, 17.0, 30.0, 55.0, 100.0}; }

SweepConfig baseline_config() {
    SweepConfig cfg;
    cfg.model.economy.alpha = 0.5;
    cfg.model.economy.delta = 0.1;
    cfg.model.economy.rho = rho_from_time_preference(0.8);
    cfg.model.economy.theta = 0.5;
    cfg.model.economy.gamma0 = 0.0;
    cfg.model.business = BusinessParams{0.25, 0.1, 17, 1};
    cfg.model.redistribution = RedistSchedule{10.0, 5.0, RedistTiming::kExtendedPeriod};
    cfg.model.schedule.agents = 1000;
    cfg.model.schedule.horizon_years = 100.0;
    cfg.model.capital_drift = CapitalDrift::kSingleStep;
    cfg.k_th_grid = baseline_grid();
    cfg.c_th_grid = baseline_grid();
    for (std::uint64_t s = 1; s <= 10; ++s) {
        cfg.seeds.push_back(s);
    }
    return cfg;
}

void SweepConfig::validate() const {
    model.validate();
    if (k_th_grid.empty() || c_th_grid.empty()) {
        throw ValidationError("grid.k_th and grid.c_th must be non-empty");
    }
    if (seeds.empty()) {
        throw ValidationError("seeds must be non-empty");
    }
    for (double k : k_th_grid) {
        MoralParams{k, 1.0}.validate();
    }
    for (double c : c_th_grid) {
        MoralParams{1.0, c}.validate();
    }
    for (std::size_t id : outputs.trace_agents) {
        if (id >= static_cast<std::size_t>(model.schedule.agents)) {
            throw ValidationError("outputs.trace_agents: agent " + std::to_string(id) +
                                  " is out of range");
        }
    }
    if (outputs.trace_cadence_days < 1) {
        throw ValidationError("outputs.trace_cadence_days must be at least 1");
    }
    if (outputs.histogram_bins < 1) {
        throw ValidationError("outputs.histogram_bins must be at least 1");
    }
}

std::vector<std::uint64_t> parse_seed_list(const std::string& spec) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(spec);
    std::string item;
    auto to_u64 = [&spec](const std::string& s) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty()) {
            throw ValidationError("seeds: cannot parse '" + spec + "'");
        }
        return static_cast<std::uint64_t>(v);
    };
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            seeds.push_back(to_u64(item));
            continue;
        }
        const std::uint64_t lo = to_u64(item.substr(0, dash));
        const std::uint64_t hi = to_u64(item.substr(dash + 1));
        if (hi < lo) {
            throw ValidationError("seeds: empty range '" + item + "'");
        }
        for (std::uint64_t s = lo; s <= hi; ++s) {
            seeds.push_back(s);
        }
    }
    if (seeds.empty()) {
        throw ValidationError("seeds: no seeds in '" + spec + "'");
    }
    return seeds;
}

SweepRow summarize(const RunResult& result, const MoralParams& cell, std::uint64_t seed) {
    return {cell.k_th, cell.c_th, seed,        result.k_med,
            result.u_med, result.g_k, result.g_u, result.balance};
}

namespace {

struct Task {
    MoralParams cell;
    std::uint64_t seed;
    bool traced;
};

std::string describe(const Task& t) {
    std::ostringstream os;
    os << "cell (k_th=" << t.cell.k_th << ", c_th=" << t.cell.c_th << ", seed=" << t.seed << ")";
    return os.str();
}

}  // namespace

SweepOutcome run_sweep(const SweepConfig& config, int threads, const ProgressCallback& progress) {
    config.validate();

    std::vector<double> ks = config.k_th_grid;
    std::vector<double> cs = config.c_th_grid;
    std::vector<std::uint64_t> seeds = config.seeds;
    std::sort(ks.begin(), ks.end());
    std::sort(cs.begin(), cs.end());
    std::sort(seeds.begin(), seeds.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

    const OutputOptions& out = config.outputs;
    const bool tracing = out.traces || out.histograms;
    std::vector<Task> tasks;
    for (double k : ks) {
        for (double c : cs) {
            const bool figure = std::any_of(
                out.figure_cells.begin(), out.figure_cells.end(),
                [&](const MoralParams& f) { return f.k_th == k && f.c_th == c; });
            for (std::uint64_t s : seeds) {
                tasks.push_back({{k, c}, s, tracing && figure && s == seeds.front()});
            }
        }
    }

    TraceConfig trace;
    if (out.traces) {
        trace.agents = out.trace_agents;
        trace.cadence_days = out.trace_cadence_days;
    }
    if (out.histograms) {
        trace.histogram_years = out.histogram_years;
        trace.histogram_bins = out.histogram_bins;
    }

    SweepOutcome outcome;
    outcome.table.resize(tasks.size());
    outcome.timings.resize(tasks.size());
    std::vector<std::unique_ptr<CellArtifacts>> artifacts(tasks.size());

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::atomic<bool> abort{false};
    std::mutex failure_mutex;
    std::size_t failed_task = tasks.size();
    std::string failure;
    std::mutex progress_mutex;

    const auto start = std::chrono::steady_clock::now();
    auto worker = [&] {
        while (!abort.load()) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= tasks.size()) {
                return;
            }
            const Task& task = tasks[idx];
            ModelConfig model = config.model;
            model.schedule.seed = task.seed;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                RunResult r = run(model, task.cell, task.traced ? trace : TraceConfig{});
                outcome.table[idx] = summarize(r, task.cell, task.seed);
                if (task.traced) {
                    artifacts[idx] = std::make_unique<CellArtifacts>(CellArtifacts{
                        task.cell, task.seed, std::move(r.traces), std::move(r.histograms)});
                }
            } catch (const std::exception& e) {
                std::lock_guard lock(failure_mutex);
                if (idx < failed_task) {
                    failed_task = idx;
                    failure = describe(task) + ": " + e.what();
                }
                abort.store(true);
                return;
            }
            outcome.timings[idx] = {
                task.cell.k_th, task.cell.c_th, task.seed,
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
            const std::size_t finished = done.fetch_add(1) + 1;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(finished, tasks.size());
            }
        }
    };

    const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    if (failed_task < tasks.size()) {
        throw CellFailure("sweep aborted at " + failure);
    }

    outcome.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (auto& a : artifacts) {
        if (a) {
            outcome.artifacts.push_back(std::move(*a));
        }
    }
    return outcome;
}

}  // namespace moralecon
