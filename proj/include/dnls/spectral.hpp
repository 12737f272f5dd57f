#pragma once

#include <array>
#include <utility>
#include <vector>

#include "dnls/linops.hpp"

namespace dnls {

// Full eigen-decomposition of a 2n x 2n linearization, with the zero pair
// (the two smallest-modulus eigenvalues) identified and the remaining modes
// characterized.
struct SpectrumReport {
    VectorXcd eigenvalues;   // sorted by (round(Im), Im, Re)
    MatrixXcd eigenvectors;  // unit columns, matching order
    std::array<int, 2> zero_pair{{-1, -1}};
    double min_gap_nonzero = 0.0;            // min pairwise distance, zero pair excluded
    double max_abs_real_part_undamped = 0.0; // max |Re λ| over nonzero modes
    VectorXd damping_rates;                  // -Re λ of nonzero modes (meaningful for γ>0)
    double kappa_estimate = 0.0;             // min rate / (γ eps), 0 when γ = 0
    double C_estimate = 0.0;                 // semigroup overshoot / γ, filled by callers
};

SpectrumReport spectrum(const MatrixXd& mat);
SpectrumReport spectrum(const MatrixXcd& mat);

// Fit of the intra-cluster eigenvalue gaps over an eps sweep.
struct GapFit {
    double C_lower = 0.0;           // inf over sweep of min intra-cluster gap / eps
    double slope = 0.0;             // regression slope of log(gap) vs log(eps)
    double cross_cluster_gap = 0.0; // at the largest eps (the n = 2 fallback)
    bool intra_valid = false;       // false when clusters have a single member
};
GapFit gap_analysis(const std::vector<std::pair<double, SpectrumReport>>& sweep);

// Spectrum of L = M - Gamma with damping-rate checks; throws NonPositiveDamping
// if γ > 0 and some nonzero mode fails to move into the left half plane.
SpectrumReport damping_rates(const BreatherProfile& profile, const LatticeConfig& cfg);

// Operator norm of the damped evolution restricted to Range(P), computed from
// the compressed generator U^T L U (U an orthonormal basis of Range(P)). See
// the implementation note for why the compression, not a projector sandwich
// around e^{tL}, is the right restriction.
double semigroup_norm(const LinearPack& pack, double t);

struct SemigroupConstants {
    double kappa_n = 0.0;  // uniform damping rate / (γ eps)
    double C_n = 0.0;      // overshoot constant in (1 + C_n γ) e^{-κ_n γ eps t}
};

// Fits (κ_n, C_n) over a fixed (eps, γ) grid at phi0 = 0. cfg supplies the
// tolerances; its eps/γ are ignored.
SemigroupConstants estimate_constants(const LatticeConfig& cfg, int n);

}  // namespace dnls
