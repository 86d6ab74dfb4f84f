#pragma once

#include <stdexcept>
#include <string>

namespace eigenamp {

// Error taxonomy. Construction-time contract violations derive from
// std::invalid_argument, runtime failures from std::runtime_error.

struct InvalidDimension : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidGroundEnergy : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InfeasibleGap : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct InsufficientAbscissae : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalDegradation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateMeasurement : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RefuseDense : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace eigenamp
