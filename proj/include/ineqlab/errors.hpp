#ifndef INEQLAB_ERRORS_HPP
#define INEQLAB_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace ineqlab {

// Thrown when an operation needs strictly positive nodal values and a node
// sits at or below the positivity floor. Never clamped away by callers.
class PositivityError : public std::runtime_error {
public:
    explicit PositivityError(const std::string& what) : std::runtime_error(what) {}
};

// Parameter outside the domain of validity of the requested computation.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// A ratio was requested but its denominator is numerically zero
// (e.g. Rayleigh quotient of a constant field).
class DegenerateError : public std::runtime_error {
public:
    explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

// Linear solver failed to reach the requested residual.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Damped Newton ran out of iterations or damping without a residual decrease.
// Carries the last iterate and the residual history for post-mortems.
class NewtonDivergence : public std::runtime_error {
public:
    NewtonDivergence(const std::string& what,
                     std::vector<double> last_rho,
                     std::vector<double> last_flux,
                     std::vector<double> residuals)
        : std::runtime_error(what),
          rho(std::move(last_rho)),
          flux(std::move(last_flux)),
          residual_history(std::move(residuals)) {}

    std::vector<double> rho;
    std::vector<double> flux;
    std::vector<double> residual_history;
};

// No damping factor above the configured minimum keeps the density positive.
class PositivityBreach : public std::runtime_error {
public:
    explicit PositivityBreach(const std::string& what) : std::runtime_error(what) {}
};

// Optimization budget could not produce any valid sample
// (carries the partial findings as plain numbers where available).
class BudgetExhausted : public std::runtime_error {
public:
    explicit BudgetExhausted(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ineqlab

#endif
