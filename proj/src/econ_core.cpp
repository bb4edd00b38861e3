#include "moralecon/econ_core.hpp"

#include <cmath>
#include <string>

#include "moralecon/errors.hpp"

namespace moralecon {

namespace {

std::string fmt_value(const char* name, double v) {
    return std::string(name) + " = " + std::to_string(v);
}

}  // namespace

void EconomyParams::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ValidationError("economy.alpha must lie in (0, 1), got " + fmt_value("alpha", alpha));
    }
    if (!(delta > 0.0)) {
        throw ValidationError("economy.delta must be positive, got " + fmt_value("delta", delta));
    }
    if (!(rho > 0.0)) {
        throw ValidationError("economy.rho must be positive, got " + fmt_value("rho", rho));
    }
    if (!(theta > 0.0)) {
        throw ValidationError("economy.theta must be positive, got " + fmt_value("theta", theta));
    }
    if (theta == 1.0) {
        throw ValidationError(
            "economy.theta = 1 makes the CRRA utility c^(1-theta)/(1-theta) singular; "
            "log utility is not supported");
    }
    if (!std::isfinite(gamma0) || !((delta + rho + theta * gamma0) / alpha > 0.0)) {
        throw ValidationError("economy.gamma0 gives a non-positive saddle base (delta + rho + "
                              "theta*gamma0)/alpha, got " + fmt_value("gamma0", gamma0));
    }
}

double saddle_capital(const EconomyParams& params, double gamma) {
    if (params.alpha == 1.0) {
        throw DomainError("saddle_capital: alpha = 1 has no saddle point");
    }
    const double base = (params.delta + params.rho + params.theta * gamma) / params.alpha;
    if (!(base > 0.0)) {
        throw DomainError("saddle_capital: non-positive base " + std::to_string(base) +
                          " for gamma = " + std::to_string(gamma));
    }
    return std::pow(base, 1.0 / (params.alpha - 1.0));
}

double saddle_consumption(const EconomyParams& params, double k_star, double gamma) {
    return std::pow(k_star, params.alpha) - (params.delta + gamma) * k_star;
}

double knowledge_rate_for_capital(const EconomyParams& params, double k_star) {
    if (!(k_star > 0.0)) {
        throw DomainError("knowledge_rate_for_capital: capital must be positive, got " +
                          std::to_string(k_star));
    }
    return (params.alpha * std::pow(k_star, params.alpha - 1.0) - params.delta - params.rho) /
           params.theta;
}

SaddlePoint initial_saddle(const EconomyParams& params) {
    const double k = saddle_capital(params, params.gamma0);
    return {k, saddle_consumption(params, k, params.gamma0), params.gamma0};
}

SaddlePoint saddle_for_capital(const EconomyParams& params, double k_star) {
    const double gamma = knowledge_rate_for_capital(params, k_star);
    return {k_star, saddle_consumption(params, k_star, gamma), gamma};
}

AdjustmentSpeed adjustment_speed(const EconomyParams& params, double k_star, double c_star,
                                 double gamma) {
    const double beta = params.rho - (1.0 - params.theta) * gamma;
    const double f2 = params.alpha * (params.alpha - 1.0) * std::pow(k_star, params.alpha - 2.0);
    const double disc = beta * beta - 4.0 * f2 * c_star / params.theta;
    return {(beta - std::sqrt(disc)) / 2.0, beta};
}

RckRates rck_residuals(const EconomyParams& params, double k, double c, double gamma) {
    const double ka = std::pow(k, params.alpha);
    return {
        ka - c - (params.delta + gamma) * k,
        c * (params.alpha * ka / k - params.delta - params.rho - params.theta * gamma) / params.theta,
    };
}

double utility_increment(double c_now, double theta, double beta, double t, double t_event,
                         double dt) {
    if (theta == 1.0) {
        throw DomainError("utility_increment: CRRA utility is singular at theta = 1");
    }
    const double one_minus = 1.0 - theta;
    return std::exp(-beta * (t - t_event)) * std::pow(c_now, one_minus) / one_minus * dt;
}

}  // namespace moralecon
