// Shared error types and numeric tolerances.
#pragma once

#include <stdexcept>
#include <string>

namespace ies {

// Absolute feasibility tolerance for device-state validation, MWh.
inline constexpr double kFeasTolMwh = 1e-6;

// Power comparison tolerance, MW.
inline constexpr double kPowerTolMw = 1e-6;

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an operation would drive the battery state outside its
// feasible range. Signals an invalid schedule, never clamped.
struct InfeasibleTransition : Error {
    using Error::Error;
};

// Raised on malformed input data (files, configs, series lengths).
struct InputError : Error {
    using Error::Error;
};

// Raised when the optimization engine fails numerically.
struct SolverError : Error {
    using Error::Error;
};

}  // namespace ies
