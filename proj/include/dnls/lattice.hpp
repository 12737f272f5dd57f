#pragma once

#include <Eigen/Dense>
#include <complex>

#include "dnls/config.hpp"

namespace dnls {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Complex = std::complex<double>;

// States live either in C^n (w) or R^{2n} with block layout
// (p_1..p_n, q_1..q_n), w_j = p_j + i q_j.
VectorXd to_real(const VectorXcd& w);
VectorXcd to_complex(const VectorXd& z);

// Lattice Laplacian with one-sided ends:
// (Δu)_1 = -u_1 + u_2, (Δu)_j = u_{j-1} - 2u_j + u_{j+1}, (Δu)_n = u_{n-1} - u_n.
VectorXcd laplacian(const VectorXcd& u);
VectorXd laplacian(const VectorXd& u);

// dw/dt = -i eps Δw - i(1+phi_shift) w + i|w|^2 w - gamma eps δ_n w.
// phi_shift = 0 is the lab frame; phi_shift = phi0 co-rotates with a breather
// of frequency offset phi0.
VectorXcd rhs_complex(const VectorXcd& w, const LatticeConfig& cfg, double phi_shift = 0.0);

// Real form of the same vector field, written out componentwise in (p, q).
VectorXd rhs_real(const VectorXd& z, const LatticeConfig& cfg, double phi0 = 0.0);

// H = (eps/2) Σ_{j<n} [(p_j-p_{j+1})^2 + (q_j-q_{j+1})^2]
//     - Σ_j [ (p_j^2+q_j^2)/2 - (p_j^2+q_j^2)^2/4 ].
// Conserved along the flow when gamma = 0.
double hamiltonian(const VectorXd& z, const LatticeConfig& cfg);
double hamiltonian(const VectorXcd& w, const LatticeConfig& cfg);

// Real form of w -> e^{i theta} w.
VectorXd gauge_rotate(const VectorXd& z, double theta);
VectorXcd gauge_rotate(const VectorXcd& w, double theta);

// Exact value of d/dt Σ|w_j|^2 along the flow: -2 gamma eps |w_n|^2.
double norm_decay_rate(const VectorXcd& w, const LatticeConfig& cfg);

}  // namespace dnls
