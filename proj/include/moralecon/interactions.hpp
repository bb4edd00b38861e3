#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "moralecon/rng.hpp"

namespace moralecon {

struct BusinessParams {
    double savings_rate = 0.25;  // lambda, share of capital kept out of the venture
    double profit_width = 0.1;   // eps_w, profit/loss rate drawn from [-eps_w, eps_w]
    int pairs = 17;              // m, pairs per business event
    int period_days = 1;         // t_bp

    /// `n_agents` bounds the number of disjoint pairs.
    void validate(int n_agents) const;
};

/// Which days redistribution fires on.
enum class RedistTiming {
    /// day == (t_rp - t_rs) mod t_rp, i.e. Mod(t_rs + t, t_rp) = 0: years
    /// 5, 15, ..., 95 for t_rp = 10, t_rs = 5.
    kOffsetPeriod,
    /// day == 0 mod (t_rp + t_rs): years 15, 30, ..., 90 for t_rp = 10,
    /// t_rs = 5. This is the timing that produced the reference sweep data.
    kExtendedPeriod,
};

struct RedistSchedule {
    double period_years = 10.0;  // t_rp
    double start_years = 5.0;    // t_rs
    RedistTiming timing = RedistTiming::kExtendedPeriod;

    void validate() const;
};

struct AgentPair {
    std::size_t first = 0;
    std::size_t second = 0;

    bool operator==(const AgentPair&) const = default;
};

inline double ramp(double x) { return std::max(x, 0.0); }

/// Both partners stake (1 - lambda) of their capital and get it back scaled by
/// (1 + eps) in proportion to the stake, i.e. each capital is multiplied by
/// 1 + eps (1 - lambda).
std::pair<double, double> joint_business(double k_i, double k_j, double lambda, double eps);

/// Draws one pair whose members are absent from `taken`, appending both to it.
/// Rejection sampling: first index, then partner.
AgentPair draw_disjoint_pair(Rng& rng, std::size_t n_agents, std::vector<std::size_t>& taken);

/// `m` pairwise-disjoint pairs, drawn in order with draw_disjoint_pair().
/// Throws ValidationError if 2m > n_agents.
std::vector<AgentPair> select_pairs(Rng& rng, std::size_t n_agents, std::size_t m);

/// One uniform draw from [-eps_w, eps_w].
inline double draw_profit_rate(Rng& rng, double eps_w) {
    return eps_w == 0.0 ? 0.0 : rng.uniform(-eps_w, eps_w);
}

/// Threshold redistribution: every agent gives up its capital above `k_th`,
/// and the pot is shared out with weights proportional to 1/k. Pot and
/// weights are taken from the pre-event capitals; reductions run left to
/// right.
///
/// Throws DomainError if any capital is below 1e-12 or non-finite.
void redistribute_in_place(std::span<double> k, double k_th);

std::vector<double> redistribute(std::span<const double> k, double k_th);

}  // namespace moralecon
