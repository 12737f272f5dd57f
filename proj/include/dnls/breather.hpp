#pragma once

#include "dnls/lattice.hpp"

namespace dnls {

// A converged member of the breather family: the real fixed-point profile
// p(phi0, eps) (q = 0) together with its frequency derivative.
struct BreatherProfile {
    double phi0 = 0.0;
    double eps = 0.0;
    VectorXd p;        // amplitudes, p(0) > 0 on the selected branch
    double residual = 0.0;  // l2 norm of F(p) after convergence
    VectorXd dp_dphi;  // ∂p/∂phi0, solves B x = p
};

// Single-site seed (1, 0, ..., 0); exact root of F at eps = phi0 = 0.
VectorXd breather_seed(int n);

// F_j = -eps (Δp)_j - (1+phi0) p_j + p_j^3.
VectorXd residual_F(const VectorXd& p, double phi0, double eps);

// Analytic Jacobian DF = -eps Δ - (1+phi0) 1 + 3 diag(p^2). Coincides with the
// matrix B of the linearization.
MatrixXd residual_jacobian(const VectorXd& p, double phi0, double eps);

// Newton from the seed, with continuation in eps (steps <= 0.05) if the direct
// iteration stalls. Requires |eps| <= cfg.eps_max and |phi0| <= 0.25.
BreatherProfile solve_breather(const LatticeConfig& cfg, double phi0);

// Newton from a caller-supplied starting point (used for warm starts when phi
// moves a little between calls). No continuation.
BreatherProfile solve_breather_from(const LatticeConfig& cfg, double phi0, const VectorXd& guess);

// ∂p/∂phi0 recomputed from the profile (solves B x = p).
VectorXd breather_derivative(const BreatherProfile& profile, const LatticeConfig& cfg);

// Truncated expansion: p_1 = 1 + (phi0-eps)/2, p_j = (-1)^{j-1} eps^{j-1}, j >= 2.
VectorXd asymptotic_profile(const LatticeConfig& cfg, double phi0);

}  // namespace dnls
