#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "moralecon/econ_core.hpp"
#include "moralecon/interactions.hpp"
#include "moralecon/rng.hpp"

namespace moralecon {

inline constexpr int kDaysPerYear = 365;
inline constexpr double kDayLength = 1.0 / kDaysPerYear;

/// The two moral thresholds. Smaller values mean a stronger moral.
struct MoralParams {
    double k_th = 100.0;  // redistribution threshold on capital
    double c_th = 100.0;  // cap on the consumption target

    void validate() const;
};

struct ScheduleConfig {
    int agents = 1000;
    double horizon_years = 100.0;
    std::uint64_t seed = 1;

    long horizon_days() const;
    void validate() const;
};

/// How capital moves while an agent's consumption is capped below its saddle
/// value.
enum class CapitalDrift {
    /// Capital accumulates (c_saddle - c) dt every day since the last event.
    kAccumulate,
    /// Capital sits at the post-event value plus a single day's drift; the
    /// drift is banked only when the next event re-anchors the agent.
    kSingleStep,
};

struct ModelConfig {
    EconomyParams economy;
    BusinessParams business;
    RedistSchedule redistribution;
    ScheduleConfig schedule;
    CapitalDrift capital_drift = CapitalDrift::kSingleStep;

    void validate() const;
};

/// What to record while a run is in progress.
struct TraceConfig {
    std::vector<std::size_t> agents;  // empty: no trace
    int cadence_days = 365;
    std::vector<double> histogram_years;  // empty: no histograms
    int histogram_bins = 40;
};

struct TraceRow {
    std::size_t agent = 0;
    double t = 0.0;
    double k = 0.0;
    double c = 0.0;
    double u = 0.0;
};

/// Equal-width bins over [lo, hi]; the last bin is closed.
struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<long> counts;
};

struct HistogramSnapshot {
    double t = 0.0;
    Histogram k;
    Histogram c;
    Histogram u;
};

Histogram make_histogram(std::span<const double> values, int bins);

/// One agent's full state, assembled on request.
struct AgentState {
    double k = 0.0;
    double c = 0.0;
    double k_a_star = 0.0;
    double c_a_star = 0.0;
    double gamma_a = 0.0;
    AdjustmentPath path;  // c_target reflects the consumption cap
    double utility = 0.0;
};

struct RunResult {
    std::vector<double> final_k;
    std::vector<double> final_c;
    std::vector<double> final_u;
    double k_med = 0.0;
    double u_med = 0.0;
    double g_k = 0.0;
    double g_u = 0.0;
    double balance = 0.0;  // +inf when g_k == 0
    std::vector<TraceRow> traces;
    std::vector<HistogramSnapshot> histograms;
};

/// Day-by-day simulation of the agent population.
///
/// Each call to step() advances one day and, in order: redistributes if the
/// day is a redistribution day, runs joint business if it is a business day,
/// re-anchors every agent whose capital changed, moves consumption along each
/// agent's adjustment path (and capital, for capped agents), and accrues
/// utility. Event days are integer predicates on the day counter.
class Simulation {
public:
    Simulation(const ModelConfig& config, const MoralParams& morals);

    long day() const { return day_; }
    double time() const { return static_cast<double>(day_) * kDayLength; }
    std::size_t size() const { return k_.size(); }

    void step();
    /// As step(), but business (if due) uses the given pairs and profit rates
    /// instead of drawing them.
    void step(std::span<const AgentPair> pairs, std::span<const double> eps);

    bool redistribution_due(long day) const;
    bool business_due(long day) const;

    std::span<const double> capital() const { return k_; }
    std::span<const double> consumption() const { return c_; }
    std::span<const double> utility() const { return u_; }
    AgentState agent(std::size_t i) const;

    std::vector<TraceRow> record_trace(std::span<const std::size_t> agent_ids) const;
    HistogramSnapshot snapshot_histogram(int bins) const;

private:
    void begin_day();
    void apply_redistribution();
    void apply_business(std::span<const AgentPair> pairs, std::span<const double> eps);
    void advance_paths();
    void reanchor(std::size_t i);
    void check_agent(std::size_t i) const;

    ModelConfig config_;
    MoralParams morals_;
    Rng rng_;
    long day_ = 0;
    long redist_period_days_;
    long redist_offset_days_;
    double one_minus_theta_;

    std::vector<double> k_;
    std::vector<double> c_;
    std::vector<double> u_;
    std::vector<double> k_anchor_;   // post-event saddle capital
    std::vector<double> c_anchor_;   // saddle consumption at k_anchor_
    std::vector<double> gamma_;
    std::vector<double> mu_;
    std::vector<double> beta_;
    std::vector<double> c_origin_;
    std::vector<long> event_day_;
    // exp(mu * elapsed) and exp(-beta * elapsed), advanced by one-day factors.
    std::vector<double> path_decay_;
    std::vector<double> path_step_;
    std::vector<double> discount_;
    std::vector<double> discount_step_;

    std::vector<std::size_t> taken_;  // scratch for pair draws
};

/// Runs one (config, morals) cell from day 0 to the horizon.
/// Throws SimulationError with the failing day and agent.
RunResult run(const ModelConfig& config, const MoralParams& morals, const TraceConfig& trace = {});

}  // namespace moralecon
