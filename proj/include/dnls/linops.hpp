#pragma once

#include "dnls/breather.hpp"

namespace dnls {

// Every matrix object attached to the linearization at a breather, with exact
// normalizations: the blocks A, B, the linearization M = [[0,A],[B,0]], the
// damping Gamma, L = M - Gamma, the zero-mode basis (v1, v2) with its adjoint
// basis (n1, n2) normalized to <n_i, v_j> = δ_ij, and the spectral projector
// P = 1 - |v1><n1| - |v2><n2| (Q = 1 - P).
struct LinearPack {
    MatrixXd A, B, M, Gamma, L;
    VectorXd v1, v2, n1, n2;
    MatrixXd P, Q;
    double phi0 = 0.0, eps = 0.0, gamma = 0.0;
    BreatherProfile profile;
};

// Matrix of the lattice Laplacian (one-sided ends).
MatrixXd laplacian_matrix(int n);

// A = eps Δ + (1+phi0) 1 - diag(p^2):   A_jj = (1+phi0) - d_j eps - p_j^2, off-diag +eps.
// B = -eps Δ - (1+phi0) 1 + 3 diag(p^2): B_jj = -(1+phi0) + d_j eps + 3 p_j^2, off-diag -eps.
// d_j is the degree (1 at the ends, 2 in the interior).
MatrixXd build_A(const BreatherProfile& profile, const LatticeConfig& cfg);
MatrixXd build_B(const BreatherProfile& profile, const LatticeConfig& cfg);
MatrixXd build_M(const BreatherProfile& profile, const LatticeConfig& cfg);

// Gamma = diag(C, C) with C = diag(0, ..., 0, gamma*eps).
MatrixXd build_Gamma(const LatticeConfig& cfg);
MatrixXd build_L(const BreatherProfile& profile, const LatticeConfig& cfg);

// v1 = (0, p), v2 = (B^{-1}p, 0), n1 = c (0, B^{-1}p), n2 = c (p, 0),
// c = 1 / (p . B^{-1} p) so the biorthonormality holds exactly.
void zero_modes(const BreatherProfile& profile, const LatticeConfig& cfg,
                VectorXd& v1, VectorXd& v2, VectorXd& n1, VectorXd& n2);

LinearPack make_pack(const BreatherProfile& profile, const LatticeConfig& cfg);
LinearPack make_pack(const LatticeConfig& cfg, double phi0);

// Unitary 2n x 2n change of basis built from the eps = phi0 = 0 eigenvectors:
// column 1 = e_{n+1}, column 2 = e_1, then for k = 1..n-1 column 2+k has s at
// row 1+k and +i s at row n+1+k, column (n+1)+k the same with -i s; s = 1/sqrt(2).
MatrixXcd transform_X(int n);

// M = M_{phi0,0} + E1 + E2 where M_{phi0,0} keeps the decoupled diagonal
// blocks, E1 = eps * (fixed integer stencil) is the eps-derivative at the
// origin, and E2 holds everything of higher order. E11_hat / E12_hat are the
// block-diagonal and first-two-row/column coupling parts of X* E1 X.
struct PerturbationSplit {
    MatrixXd M_phi0_0, E1, E2;
    MatrixXcd E11_hat, E12_hat;
};
PerturbationSplit perturbation_split(const BreatherProfile& profile, const LatticeConfig& cfg);

struct TridiagonalReport {
    bool simple = false;
    double min_gap = 0.0;
    bool first_last_nonzero = false;
    VectorXd eigenvalues;
};

// Checks a symmetric tridiagonal matrix with nonzero off-diagonals: all
// eigenvalues simple, every eigenvector with nonzero first and last entries.
TridiagonalReport tridiagonal_check(const MatrixXd& U);

}  // namespace dnls
