#pragma once

#include <stdexcept>
#include <string>

namespace moralecon {

/// Raised when a formula is evaluated outside its mathematical domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when a parameter set or configuration violates its invariants.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by the engine when an agent leaves the valid state space.
class SimulationError : public std::runtime_error {
public:
    SimulationError(long day, long agent, const std::string& what)
        : std::runtime_error("day " + std::to_string(day) + ", agent " +
                             std::to_string(agent) + ": " + what),
          day_(day), agent_(agent) {}

    long day() const noexcept { return day_; }
    long agent() const noexcept { return agent_; }

private:
    long day_;
    long agent_;
};

/// Raised when an iterative fit does not converge.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace moralecon
