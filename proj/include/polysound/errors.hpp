#pragma once

#include <stdexcept>
#include <string>

namespace polysound {

// Base class for every failure this library reports.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// An argument lies outside the operation's physical or numerical domain.
struct DomainError : Error {
    using Error::Error;
};

// The requested quantity is not defined for the given input (e.g. a width
// equation with no positive root because both the gradient correction and
// the interaction term vanish).
struct DegenerateInput : Error {
    using Error::Error;
};

// An iterative solver hit its iteration cap or its coefficients left the
// representable range.  Signals pathological parameters, never weak
// tolerances.
struct ConvergenceFailure : Error {
    using Error::Error;
};

// A cloud width below the gradient-correction floor was passed where an
// equilibrium width was required; the speed-of-sound formula would take the
// square root of a negative number.
struct SubcriticalWidth : Error {
    using Error::Error;
};

// Magnetic field exactly on a Feshbach resonance pole.
struct ResonanceDivergence : Error {
    using Error::Error;
};

// A density sample reached zero or below during a simulation.  The scheme
// never clamps; it aborts.
struct DensityFloorViolation : Error {
    using Error::Error;
};

// The instability detector tripped (mass drift or amplitude blow-up).
struct SimulationUnstable : Error {
    using Error::Error;
};

// A measurement was asked of a probe series that cannot support it
// (constant signal, or fewer than the minimum number of oscillations).
struct InsufficientData : Error {
    using Error::Error;
};

// A fit window that must be monotone is not (wrapped or reflected pulse).
struct InvalidWindow : Error {
    using Error::Error;
};

// Bad command line, config file, or precondition caught before any work.
struct UsageError : Error {
    using Error::Error;
};

// Filesystem failure while reading inputs or writing outputs.
struct IoError : Error {
    using Error::Error;
};

}  // namespace polysound
