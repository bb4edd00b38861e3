#include "moralecon/interactions.hpp"

#include <cmath>
#include <string>

#include "moralecon/errors.hpp"

namespace moralecon {

void BusinessParams::validate(int n_agents) const {
    if (!(savings_rate >= 0.0 && savings_rate < 1.0)) {
        throw ValidationError("business.savings_rate must lie in [0, 1), got " +
                              std::to_string(savings_rate));
    }
    if (!(profit_width >= 0.0)) {
        throw ValidationError("business.profit_width must be non-negative, got " +
                              std::to_string(profit_width));
    }
    if (pairs < 0 || 2L * pairs > n_agents) {
        throw ValidationError("business.pairs must satisfy 0 <= 2*pairs <= agents, got pairs = " +
                              std::to_string(pairs) + " for " + std::to_string(n_agents) +
                              " agents");
    }
    if (period_days < 1) {
        throw ValidationError("business.period_days must be at least 1, got " +
                              std::to_string(period_days));
    }
}

void RedistSchedule::validate() const {
    if (!(period_years > 0.0)) {
        throw ValidationError("redistribution.period_years must be positive");
    }
    if (!(start_years >= 0.0 && start_years < period_years)) {
        throw ValidationError("redistribution.start_years must lie in [0, period_years)");
    }
}

std::pair<double, double> joint_business(double k_i, double k_j, double lambda, double eps) {
    const double factor = lambda + (1.0 + eps) * (1.0 - lambda);
    return {k_i * factor, k_j * factor};
}

AgentPair draw_disjoint_pair(Rng& rng, std::size_t n_agents, std::vector<std::size_t>& taken) {
    auto is_taken = [&taken](std::size_t idx) {
        return std::find(taken.begin(), taken.end(), idx) != taken.end();
    };
    std::size_t first = rng.uniform_index(n_agents);
    while (is_taken(first)) {
        first = rng.uniform_index(n_agents);
    }
    taken.push_back(first);
    std::size_t second = rng.uniform_index(n_agents);
    while (is_taken(second)) {
        second = rng.uniform_index(n_agents);
    }
    taken.push_back(second);
    return {first, second};
}

std::vector<AgentPair> select_pairs(Rng& rng, std::size_t n_agents, std::size_t m) {
    if (2 * m > n_agents) {
        throw ValidationError("select_pairs: cannot draw " + std::to_string(m) +
                              " disjoint pairs from " + std::to_string(n_agents) + " agents");
    }
    std::vector<AgentPair> pairs;
    pairs.reserve(m);
    std::vector<std::size_t> taken;
    taken.reserve(2 * m);
    for (std::size_t p = 0; p < m; ++p) {
        pairs.push_back(draw_disjoint_pair(rng, n_agents, taken));
    }
    return pairs;
}

void redistribute_in_place(std::span<double> k, double k_th) {
    if (!(k_th > 0.0)) {
        throw DomainError("redistribute: threshold must be positive, got " + std::to_string(k_th));
    }
    double pot = 0.0;
    double inv_sum = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (!(k[i] >= 1e-12) || !std::isfinite(k[i])) {
            throw DomainError("redistribute: capital of agent " + std::to_string(i) +
                              " is not usable as a 1/k weight: " + std::to_string(k[i]));
        }
        pot += ramp(k[i] - k_th);
        inv_sum += 1.0 / k[i];
    }
    if (pot == 0.0) {
        return;
    }
    for (double& ki : k) {
        ki = ki - ramp(ki - k_th) + (1.0 / ki) / inv_sum * pot;
    }
}

std::vector<double> redistribute(std::span<const double> k, double k_th) {
    std::vector<double> out(k.begin(), k.end());
    redistribute_in_place(out, k_th);
    return out;
}

}  // namespace moralecon
