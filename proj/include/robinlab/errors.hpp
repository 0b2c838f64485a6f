#pragma once

#include <stdexcept>
#include <string>

namespace robinlab {

/// Bad input: malformed parameters, dimension mismatches, invalid specs.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure broke down (singular solve, no convergence).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Coefficient field fails its declared ellipticity bound on some cell.
class EllipticityViolation : public InvalidArgument {
public:
    EllipticityViolation(const std::string& what, int cell) : InvalidArgument(what), cell_(cell) {}
    int cell() const noexcept { return cell_; }

private:
    int cell_;
};

/// A dense operation was asked for beyond the vertex budget.
class BudgetExceeded : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

}  // namespace robinlab
