#pragma once

#include <stdexcept>
#include <string>

namespace dnls {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Newton / fixed-point iteration did not reach tolerance.
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct JacobianSingular : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroOffDiagonal : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adaptive step fell below the resolvable scale.
struct StepUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Normal component left the a-priori ball during an epoch.
struct CeilingExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfNeighborhood : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPositiveDamping : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace dnls
