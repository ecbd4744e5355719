#pragma once

#include <stdexcept>
#include <string>

namespace reslab {

/// Thrown when an operation would exceed its configured work budget.
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a construction problem has no solution under the given
/// parameters (e.g. not enough smooth integers in the requested window).
class Infeasible : public std::runtime_error {
public:
    explicit Infeasible(const std::string& what) : std::runtime_error(what) {}
};

} // namespace reslab
