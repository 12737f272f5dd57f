#pragma once

#include <cmath>

#include "dnls/errors.hpp"

namespace dnls {

// Problem parameters of the damped DNLS chain plus the numeric tolerances
// shared by the solvers. Values are immutable once handed to the solvers.
struct LatticeConfig {
    int n = 3;                // site count, n >= 2
    double eps = 0.1;         // coupling; signed, |eps| < eps_max
    double gamma = 0.0;       // damping strength at site n, >= 0
    double eps_max = 0.25;
    double newton_tol = 1e-12;
    double ode_rtol = 1e-11;
    double ode_atol = 1e-13;

    void validate() const;
};

inline void LatticeConfig::validate() const {
    if (n < 2) throw ConfigError("LatticeConfig: n must be >= 2");
    if (!(eps == eps) || !(eps > -1e30 && eps < 1e30))
        throw ConfigError("LatticeConfig: eps must be finite");
    if (std::abs(eps) >= eps_max)
        throw ConfigError("LatticeConfig: |eps| must be < eps_max = " + std::to_string(eps_max));
    if (gamma < 0) throw ConfigError("LatticeConfig: gamma must be >= 0");
    if (!(newton_tol > 0) || !(ode_rtol > 0) || !(ode_atol > 0))
        throw ConfigError("LatticeConfig: tolerances must be strictly positive");
}

}  // namespace dnls
