#pragma once

// Closed-form Ramsey-Cass-Koopmans dynamics for a single agent with a
// Cobb-Douglas production function f(k) = k^alpha and no labour growth.
//
// Everything here is a pure function of its arguments. Rates are per year,
// times are in years.

#include <cmath>

namespace moralecon {

struct EconomyParams {
    double alpha = 0.5;   // production-function exponent
    double delta = 0.1;   // capital depletion rate
    double rho = 0.22314355131420976;  // ln(1/0.8)
    double theta = 0.5;   // relative risk aversion, must not be 1
    double gamma0 = 0.0;  // initial knowledge growth rate

    /// Throws ValidationError describing the first violated invariant.
    void validate() const;
};

/// Stationary point of the capital/consumption system for a given knowledge
/// growth rate.
struct SaddlePoint {
    double k_star = 0.0;
    double c_star = 0.0;
    double gamma = 0.0;
};

struct AdjustmentSpeed {
    double mu = 0.0;    // strictly negative
    double beta = 0.0;  // broad-sense discount rate
};

/// Exponential relaxation of consumption after a capital jump.
struct AdjustmentPath {
    double c_origin = 0.0;
    double c_target = 0.0;
    double mu = 0.0;
    double beta = 0.0;
    double t_event = 0.0;
};

struct RckRates {
    double k_dot = 0.0;
    double c_dot = 0.0;
};

/// k* = ((delta + rho + theta*gamma) / alpha)^(1 / (alpha - 1)).
double saddle_capital(const EconomyParams& params, double gamma);

/// c* = k*^alpha - (delta + gamma) k*.
double saddle_consumption(const EconomyParams& params, double k_star, double gamma);

/// Knowledge growth rate that makes `k_star` a saddle point; the inverse of
/// saddle_capital().
double knowledge_rate_for_capital(const EconomyParams& params, double k_star);

/// Saddle point reached from the initial knowledge rate gamma0.
SaddlePoint initial_saddle(const EconomyParams& params);

/// Saddle point anchored at a given post-event capital.
SaddlePoint saddle_for_capital(const EconomyParams& params, double k_star);

/// Linearised convergence speed around (k_star, c_star). The negative root of
/// mu^2 - beta*mu + f''(k*) c* / theta = 0, which exists because f'' < 0.
AdjustmentSpeed adjustment_speed(const EconomyParams& params, double k_star,
                                 double c_star, double gamma);

/// Right-hand sides of the capital and consumption equations of motion.
RckRates rck_residuals(const EconomyParams& params, double k, double c, double gamma);

inline double consumption_on_path(const AdjustmentPath& path, double t) {
    return path.c_target + std::exp(path.mu * (t - path.t_event)) * (path.c_origin - path.c_target);
}

/// One rectangle-rule step of the capital gained while consumption is held
/// below its saddle value.
inline double capital_drift_increment(double c_saddle, double c_now, double dt) {
    return (c_saddle - c_now) * dt;
}

/// Discounted CRRA utility accrued over one step. The discount clock restarts
/// at every capital event (t_event).
///
/// Throws DomainError for theta == 1.
double utility_increment(double c_now, double theta, double beta, double t,
                         double t_event, double dt);

}  // namespace moralecon
