#include "moralecon/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "moralecon/errors.hpp"
#include "moralecon/metrics.hpp"

namespace moralecon {

void MoralParams::validate() const {
    if (!(k_th > 0.0)) {
        throw ValidationError("morals.k_th must be positive, got " + std::to_string(k_th));
    }
    if (!(c_th > 0.0)) {
        throw ValidationError("morals.c_th must be positive, got " + std::to_string(c_th));
    }
}

long ScheduleConfig::horizon_days() const {
    return std::lround(horizon_years * kDaysPerYear);
}

void ScheduleConfig::validate() const {
    if (agents < 2) {
        throw ValidationError("schedule.agents must be at least 2, got " + std::to_string(agents));
    }
    if (!(horizon_years > 0.0) || horizon_days() < 1) {
        throw ValidationError("schedule.horizon_years must cover at least one day");
    }
}

void ModelConfig::validate() const {
    economy.validate();
    schedule.validate();
    business.validate(schedule.agents);
    redistribution.validate();
    if (!(schedule.horizon_years > redistribution.start_years)) {
        throw ValidationError("schedule.horizon_years must exceed redistribution.start_years");
    }
}

Histogram make_histogram(std::span<const double> values, int bins) {
    if (bins < 1) {
        throw ValidationError("histogram bins must be at least 1, got " + std::to_string(bins));
    }
    Histogram h;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    if (values.empty()) {
        return h;
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    h.lo = *lo;
    h.hi = *hi;
    const double width = (h.hi - h.lo) / bins;
    for (double v : values) {
        long b = width > 0.0 ? static_cast<long>((v - h.lo) / width) : 0;
        b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

Simulation::Simulation(const ModelConfig& config, const MoralParams& morals)
    : config_(config), morals_(morals), rng_(config.schedule.seed) {
    config_.validate();
    morals_.validate();

    const RedistSchedule& rs = config_.redistribution;
    if (rs.timing == RedistTiming::kOffsetPeriod) {
        // Mod(t_rs + t, t_rp) == 0  <=>  t == t_rp - t_rs (mod t_rp)
        redist_period_days_ = std::lround(rs.period_years * kDaysPerYear);
        redist_offset_days_ =
            std::lround((rs.period_years - rs.start_years) * kDaysPerYear) % redist_period_days_;
    } else {
        redist_period_days_ = std::lround((rs.period_years + rs.start_years) * kDaysPerYear);
        redist_offset_days_ = 0;
    }
    if (redist_period_days_ < 1) {
        throw ValidationError("redistribution.period_years must cover at least one day");
    }
    one_minus_theta_ = 1.0 - config_.economy.theta;

    const auto n = static_cast<std::size_t>(config_.schedule.agents);
    const SaddlePoint s0 = initial_saddle(config_.economy);
    const AdjustmentSpeed v0 = adjustment_speed(config_.economy, s0.k_star, s0.c_star, s0.gamma);
    if (!(s0.k_star > 0.0 && s0.c_star > 0.0)) {
        throw ValidationError("economy parameters give a non-positive initial saddle point");
    }

    k_.assign(n, s0.k_star);
    c_.assign(n, s0.c_star);
    u_.assign(n, 0.0);
    k_anchor_.assign(n, s0.k_star);
    c_anchor_.assign(n, s0.c_star);
    gamma_.assign(n, s0.gamma);
    mu_.assign(n, v0.mu);
    beta_.assign(n, v0.beta);
    c_origin_.assign(n, s0.c_star);
    event_day_.assign(n, 0);
    path_decay_.assign(n, 1.0);
    path_step_.assign(n, std::exp(v0.mu * kDayLength));
    discount_.assign(n, 1.0);
    discount_step_.assign(n, std::exp(-v0.beta * kDayLength));
    taken_.reserve(2 * static_cast<std::size_t>(config_.business.pairs));
}

bool Simulation::redistribution_due(long day) const {
    return day % redist_period_days_ == redist_offset_days_ &&
           day <= config_.schedule.horizon_days();
}

bool Simulation::business_due(long day) const {
    return config_.business.pairs > 0 && day % config_.business.period_days == 0;
}

void Simulation::begin_day() {
    ++day_;
    if (redistribution_due(day_)) {
        apply_redistribution();
    }
}

void Simulation::step() {
    begin_day();
    if (business_due(day_)) {
        const auto m = static_cast<std::size_t>(config_.business.pairs);
        taken_.clear();
        // Draw order per pair: first index, partner, profit rate.
        for (std::size_t p = 0; p < m; ++p) {
            const AgentPair pair = draw_disjoint_pair(rng_, k_.size(), taken_);
            const double eps = draw_profit_rate(rng_, config_.business.profit_width);
            apply_business({&pair, 1}, {&eps, 1});
        }
    }
    advance_paths();
}

void Simulation::step(std::span<const AgentPair> pairs, std::span<const double> eps) {
    if (pairs.size() != eps.size()) {
        throw ValidationError("step: one profit rate is needed per pair");
    }
    std::vector<char> used(k_.size(), 0);
    for (const AgentPair& p : pairs) {
        if (p.first >= k_.size() || p.second >= k_.size() || p.first == p.second) {
            throw ValidationError("step: pair (" + std::to_string(p.first) + ", " +
                                  std::to_string(p.second) + ") is not two distinct agents");
        }
        if (used[p.first] || used[p.second]) {
            throw ValidationError("step: pairs must be disjoint");
        }
        used[p.first] = used[p.second] = 1;
    }
    begin_day();
    if (business_due(day_)) {
        apply_business(pairs, eps);
    }
    advance_paths();
}

void Simulation::reanchor(std::size_t i) {
    if (!(k_[i] > 0.0) || !std::isfinite(k_[i])) {
        throw SimulationError(day_, static_cast<long>(i),
                              "capital left the valid range: " + std::to_string(k_[i]));
    }
    const SaddlePoint s = saddle_for_capital(config_.economy, k_[i]);
    const AdjustmentSpeed v = adjustment_speed(config_.economy, s.k_star, s.c_star, s.gamma);
    k_anchor_[i] = s.k_star;
    c_anchor_[i] = s.c_star;
    gamma_[i] = s.gamma;
    mu_[i] = v.mu;
    beta_[i] = v.beta;
    c_origin_[i] = c_[i];
    event_day_[i] = day_;
    path_decay_[i] = 1.0;
    path_step_[i] = std::exp(v.mu * kDayLength);
    discount_[i] = 1.0;
    discount_step_[i] = std::exp(-v.beta * kDayLength);
    if (!(s.c_star > 0.0) || !std::isfinite(v.mu)) {
        throw SimulationError(day_, static_cast<long>(i),
                              "re-anchoring at capital " + std::to_string(k_[i]) +
                                  " gives saddle consumption " + std::to_string(s.c_star));
    }
}

void Simulation::apply_redistribution() {
    // Nobody above the threshold: the pot is empty, no capital moves, and no
    // agent re-anchors.
    if (std::none_of(k_.begin(), k_.end(), [this](double k) { return k > morals_.k_th; })) {
        return;
    }
    try {
        redistribute_in_place(k_, morals_.k_th);
    } catch (const DomainError& e) {
        throw SimulationError(day_, -1, e.what());
    }
    for (std::size_t i = 0; i < k_.size(); ++i) {
        reanchor(i);
    }
}

void Simulation::apply_business(std::span<const AgentPair> pairs, std::span<const double> eps) {
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto [i, j] = pairs[p];
        std::tie(k_[i], k_[j]) =
            joint_business(k_[i], k_[j], config_.business.savings_rate, eps[p]);
        reanchor(i);
        reanchor(j);
    }
}

void Simulation::advance_paths() {
    const double c_th = morals_.c_th;
    const double omt = one_minus_theta_;
    const bool accumulate = config_.capital_drift == CapitalDrift::kAccumulate;
    const bool sqrt_utility = omt == 0.5;
    for (std::size_t i = 0; i < k_.size(); ++i) {
        if (event_day_[i] != day_) {
            path_decay_[i] *= path_step_[i];
            discount_[i] *= discount_step_[i];
        }
        const bool capped = c_anchor_[i] > c_th;
        const double target = capped ? c_th : c_anchor_[i];
        const double c = target + path_decay_[i] * (c_origin_[i] - target);
        c_[i] = c;
        if (capped) {
            const double drift = capital_drift_increment(c_anchor_[i], c, kDayLength);
            k_[i] = accumulate ? k_[i] + drift : k_anchor_[i] + drift;
        } else {
            k_[i] = k_anchor_[i];
        }
        const double felicity = (sqrt_utility ? std::sqrt(c) : std::pow(c, omt)) / omt;
        u_[i] += discount_[i] * felicity * kDayLength;
        if (!(k_[i] > 0.0) || !(c > 0.0) || !std::isfinite(k_[i]) || !std::isfinite(u_[i])) {
            check_agent(i);
        }
    }
}

void Simulation::check_agent(std::size_t i) const {
    const auto agent = static_cast<long>(i);
    if (!std::isfinite(k_[i]) || !std::isfinite(c_[i]) || !std::isfinite(u_[i])) {
        throw SimulationError(day_, agent, "non-finite state (k = " + std::to_string(k_[i]) +
                                               ", c = " + std::to_string(c_[i]) + ")");
    }
    if (!(k_[i] > 0.0)) {
        throw SimulationError(day_, agent, "capital became non-positive: " + std::to_string(k_[i]));
    }
    throw SimulationError(day_, agent, "consumption became non-positive: " + std::to_string(c_[i]));
}

AgentState Simulation::agent(std::size_t i) const {
    AgentState s;
    s.k = k_.at(i);
    s.c = c_[i];
    s.k_a_star = k_anchor_[i];
    s.c_a_star = c_anchor_[i];
    s.gamma_a = gamma_[i];
    s.path.c_origin = c_origin_[i];
    s.path.c_target = std::min(c_anchor_[i], morals_.c_th);
    s.path.mu = mu_[i];
    s.path.beta = beta_[i];
    s.path.t_event = static_cast<double>(event_day_[i]) * kDayLength;
    s.utility = u_[i];
    return s;
}

std::vector<TraceRow> Simulation::record_trace(std::span<const std::size_t> agent_ids) const {
    std::vector<TraceRow> rows;
    rows.reserve(agent_ids.size());
    for (std::size_t id : agent_ids) {
        rows.push_back({id, time(), k_.at(id), c_[id], u_[id]});
    }
    return rows;
}

HistogramSnapshot Simulation::snapshot_histogram(int bins) const {
    return {time(), make_histogram(k_, bins), make_histogram(c_, bins), make_histogram(u_, bins)};
}

RunResult run(const ModelConfig& config, const MoralParams& morals, const TraceConfig& trace) {
    Simulation sim(config, morals);
    for (std::size_t id : trace.agents) {
        if (id >= sim.size()) {
            throw ValidationError("trace agent " + std::to_string(id) + " is out of range");
        }
    }
    if (!trace.agents.empty() && trace.cadence_days < 1) {
        throw ValidationError("trace cadence must be at least one day");
    }
    std::vector<long> hist_days;
    for (double y : trace.histogram_years) {
        hist_days.push_back(std::lround(y * kDaysPerYear));
    }

    RunResult result;
    auto snapshot_if_due = [&] {
        if (std::find(hist_days.begin(), hist_days.end(), sim.day()) != hist_days.end()) {
            result.histograms.push_back(sim.snapshot_histogram(trace.histogram_bins));
        }
    };
    snapshot_if_due();

    const long horizon = config.schedule.horizon_days();
    for (long d = 1; d <= horizon; ++d) {
        sim.step();
        if (!trace.agents.empty() && d % trace.cadence_days == 0) {
            auto rows = sim.record_trace(trace.agents);
            result.traces.insert(result.traces.end(), rows.begin(), rows.end());
        }
        snapshot_if_due();
    }

    result.final_k.assign(sim.capital().begin(), sim.capital().end());
    result.final_c.assign(sim.consumption().begin(), sim.consumption().end());
    result.final_u.assign(sim.utility().begin(), sim.utility().end());
    result.k_med = median(result.final_k);
    result.u_med = median(result.final_u);
    result.g_k = gini(result.final_k);
    // Utility is negative for theta > 1, where its Gini index is meaningless.
    result.g_u = *std::min_element(result.final_u.begin(), result.final_u.end()) >= 0.0
                     ? gini(result.final_u)
                     : std::numeric_limits<double>::quiet_NaN();
    result.balance = result.g_k > 0.0 ? balance_index(result.u_med, result.g_k)
                                      : std::numeric_limits<double>::infinity();
    return result;
}

}  // namespace moralecon
