#pragma once

#include <functional>
#include <vector>

#include "dnls/lattice.hpp"

namespace dnls {

// Time-stamped samples of one trajectory plus running diagnostics. The
// dissipation integral ∫ 2 γ eps |w_n|^2 dτ is carried inside the integrator
// state, so norms_sq[k] + diss_integral[k] is conserved to ODE tolerance.
struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<VectorXcd> states;
    std::vector<double> hamiltonians;
    std::vector<double> norms_sq;
    std::vector<double> diss_integral;
    long accepted_steps = 0;
    long rejected_steps = 0;
};

using Rhs = std::function<VectorXcd(double, const VectorXcd&)>;

// The lattice vector field in a frame rotating at phi_shift.
Rhs make_rhs(const LatticeConfig& cfg, double phi_shift);

struct IntegrateOptions {
    double rtol = 0.0;      // 0 -> cfg.ode_rtol
    double atol = 0.0;      // 0 -> cfg.ode_atol
    bool fixed_step = false;
    double h_init = 0.0;    // required when fixed_step
};

// Adaptive Dormand-Prince 5(4) with FSAL and a PI-free standard controller.
// Error criterion per component: |e_j| <= atol + rtol * ||w||_inf. Samples are
// taken at t0 + k*sample_dt and at t1; steps land on sample times exactly.
// Deterministic for identical inputs.
TrajectoryRecord integrate(const Rhs& rhs, const VectorXcd& w0, double t0, double t1,
                           const LatticeConfig& cfg, double sample_dt,
                           const IntegrateOptions& opt = {});

struct MonitorReport {
    double H_drift = 0.0;
    double norm_identity_residual = 0.0;       // via the integrated quadrature
    double norm_identity_residual_trap = 0.0;  // via trapezoid on the samples
    long accepted_steps = 0;
    long rejected_steps = 0;
    bool norm_identity_ok = false;
    bool energy_ok = false;  // meaningful at gamma = 0
};
MonitorReport monitor(const TrajectoryRecord& traj, const LatticeConfig& cfg);

}  // namespace dnls
