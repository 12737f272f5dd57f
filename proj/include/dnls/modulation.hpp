#pragma once

#include "dnls/integrate.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

// Coordinates of a phase-space point relative to the breather cylinder:
// W = e^{i(t phi + theta)} (p(phi) + z), with zeta = (Re z, Im z) constrained
// to Range(P_{base_phi}), i.e. <n1_base, zeta> = <n2_base, zeta> = 0.
struct ModulationFrame {
    double t = 0.0;
    double phi = 0.0;
    double theta = 0.0;  // stored unwrapped
    VectorXd zeta;
    double base_phi = 0.0;
    double s = 0.0;  // ∫ (τ phi' + theta') dτ accumulated over the epoch
    double delta() const { return phi - base_phi; }
};

// Per-epoch ledger of the evolution bounds.
struct EpochReport {
    double T = 0.0;
    double phi_shift_measured = 0.0;  // phi(T) - phi0
    double zeta_norm_max = 0.0;
    double zeta_norm_end = 0.0;
    double zeta_norm_after_reproj = 0.0;
    double delta_T = 0.0;
    double s_T = 0.0;
    double total_phase_T = 0.0;  // t*phi + theta at the end of the epoch
    double phi_new = 0.0;        // base of the next epoch
    bool pass_interior = false;  // sup ||zeta|| <= 2 γ eps^n
    bool pass_reproj = false;    // ||zeta_hat(T)|| <= γ eps^n
    bool pass_drift = false;     // |δ(T) + 2 γ eps^{2n-1} T| <= 2 γ eps^{2n-1/2} T
    bool all_pass() const { return pass_interior && pass_reproj && pass_drift; }
};

struct EpochSample {
    double t = 0.0;              // global time across chained epochs
    double winding_phase = 0.0;  // accumulated t*phi + theta, continuous
    double phi = 0.0, theta = 0.0, zeta_norm = 0.0, delta = 0.0, s = 0.0;
};

// e^{i(t phi + theta)} (p(phi) + z).
VectorXcd reconstruct(const ModulationFrame& frame, const LatticeConfig& cfg);

// Solves the two constraints <n1_base, zeta> = <n2_base, zeta> = 0 for
// (phi, theta) given the full state; the constraint frame stays at base.phi0.
ModulationFrame decompose_fixed_frame(const VectorXcd& W, double t, const LinearPack& base,
                                      double phi_guess, double theta_guess,
                                      const LatticeConfig& cfg);

// Re-bases the decomposition: finds (phi_hat, theta_hat) so the remainder is
// normal to the cylinder at the new point itself.
ModulationFrame reorthogonalize(const VectorXcd& W, double t, double phi_guess,
                                double theta_guess, const LatticeConfig& cfg);

// Arrival time T = 8 C_n / (κ_n eps). Enlarged minimally when the fitted
// constants violate (1 + 1.5 C_n γ) e^{-κ_n γ eps T / 4} <= 1.
double stopping_time(const LatticeConfig& cfg, const SemigroupConstants& k);

// Evolves the full dynamics from reconstruct(frame0) over [t0, t0 + T],
// decomposing at a fixed cadence, then re-orthogonalizes at T. The returned
// frame has its epoch clock reset to t = 0. Throws CeilingExceeded when
// ||zeta|| > 4 γ eps^n.
std::pair<EpochReport, ModulationFrame> run_epoch(const ModulationFrame& frame0,
                                                  const LatticeConfig& cfg,
                                                  const SemigroupConstants& constants,
                                                  std::vector<EpochSample>* samples = nullptr);

struct EpochChain {
    std::vector<EpochReport> reports;
    std::vector<EpochSample> samples;
    std::vector<double> phi_k;  // base frequencies, phi_k[0] = phi0
    bool window_exceeded = false;
};

// Chains run_epoch K times, re-basing the projector at each new phi_hat.
// Stops cleanly with partial results once the drift window is exhausted.
EpochChain iterate_epochs(const ModulationFrame& frame0, int K, const LatticeConfig& cfg,
                          const SemigroupConstants& constants, bool keep_samples = false);

// The exact inner products behind the term-by-term bounds on the projected
// evolution, evaluated for a supplied (p(phi), zeta). Used by scaling tests.
struct LemmaResiduals {
    double termU2 = 0.0, termU1 = 0.0, termUP = 0.0;
    double t2 = 0.0, t2a = 0.0, t2P = 0.0;
    double t3 = 0.0, t3b = 0.0;
    double t3c_first = 0.0, t3c_second = 0.0;
    double t4 = 0.0, t4b = 0.0;
    double t4c_first = 0.0, t4c_second = 0.0;
};
LemmaResiduals lemma_residuals(const LinearPack& base, const BreatherProfile& at_phi,
                               const VectorXd& zeta, const LatticeConfig& cfg);

// Long unsegmented run from the breather at phi0 = 0: times of the m-th full
// 2π winding of t*phi + theta, against the prediction sqrt(2π m / (γ eps^{2n-1})).
struct WindingResult {
    std::vector<double> measured;
    std::vector<double> predicted;
};
WindingResult winding_times(const LatticeConfig& cfg, int m_max);

}  // namespace dnls
