#include "dnls/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace dnls {

Rhs make_rhs(const LatticeConfig& cfg, double phi_shift) {
    return [cfg, phi_shift](double, const VectorXcd& w) { return rhs_complex(w, cfg, phi_shift); };
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b(5th) - b(4th)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StageSet {
    VectorXcd k1, k2, k3, k4, k5, k6, k7;
    double g1, g2, g3, g4, g5, g6, g7;  // quadrature integrand at the stages
};

}  // namespace

TrajectoryRecord integrate(const Rhs& rhs, const VectorXcd& w0, double t0, double t1,
                           const LatticeConfig& cfg, double sample_dt,
                           const IntegrateOptions& opt) {
    if (!(t1 > t0)) throw ConfigError("integrate: t1 must exceed t0");
    if (!(sample_dt > 0)) throw ConfigError("integrate: sample_dt must be positive");
    if (w0.size() != cfg.n) throw DimensionError("integrate: state length != cfg.n");
    if (!w0.allFinite()) throw NonFiniteState("integrate: initial state not finite");
    if (opt.fixed_step && !(opt.h_init > 0))
        throw ConfigError("integrate: fixed_step requires h_init > 0");

    const double rtol = opt.rtol > 0 ? opt.rtol : cfg.ode_rtol;
    const double atol = opt.atol > 0 ? opt.atol : cfg.ode_atol;
    const double h_min = 1e-14 * (t1 - t0);
    const int last = cfg.n - 1;
    auto quad = [&](const VectorXcd& w) {
        return 2.0 * cfg.gamma * cfg.eps * std::norm(w(last));
    };

    std::vector<double> sample_times{t0};
    for (long k = 1;; ++k) {
        const double tk = t0 + static_cast<double>(k) * sample_dt;
        if (tk >= t1 - 1e-12 * (t1 - t0)) break;
        sample_times.push_back(tk);
    }
    sample_times.push_back(t1);

    TrajectoryRecord rec;
    auto push_sample = [&](double t, const VectorXcd& w, double D) {
        rec.times.push_back(t);
        rec.states.push_back(w);
        rec.hamiltonians.push_back(hamiltonian(w, cfg));
        rec.norms_sq.push_back(w.squaredNorm());
        rec.diss_integral.push_back(D);
    };

    VectorXcd y = w0;
    double D = 0.0;
    double t = t0;
    VectorXcd k1 = rhs(t, y);
    double g1 = quad(y);
    double h_prop = opt.fixed_step ? opt.h_init : std::min({0.01, sample_dt, (t1 - t0) / 10.0});

    push_sample(t, y, D);

    StageSet s;
    long steps_guard = 0;
    for (size_t si = 1; si < sample_times.size(); ++si) {
        const double target = sample_times[si];
        while (t < target - 1e-14 * (t1 - t0)) {
            if (++steps_guard > 200'000'000L)
                throw SolverFailure("integrate: step budget exhausted");
            const bool clamped = h_prop > target - t;
            const double h = clamped ? target - t : h_prop;
            if (!opt.fixed_step && h < h_min)
                throw StepUnderflow("integrate: step size underflow at t = " + std::to_string(t));

            s.k1 = k1;
            s.g1 = g1;
            VectorXcd yt = y + h * (a21 * s.k1);
            s.k2 = rhs(t + c2 * h, yt);
            s.g2 = quad(yt);
            yt = y + h * (a31 * s.k1 + a32 * s.k2);
            s.k3 = rhs(t + c3 * h, yt);
            s.g3 = quad(yt);
            yt = y + h * (a41 * s.k1 + a42 * s.k2 + a43 * s.k3);
            s.k4 = rhs(t + c4 * h, yt);
            s.g4 = quad(yt);
            yt = y + h * (a51 * s.k1 + a52 * s.k2 + a53 * s.k3 + a54 * s.k4);
            s.k5 = rhs(t + c5 * h, yt);
            s.g5 = quad(yt);
            yt = y + h * (a61 * s.k1 + a62 * s.k2 + a63 * s.k3 + a64 * s.k4 + a65 * s.k5);
            s.k6 = rhs(t + h, yt);
            s.g6 = quad(yt);
            const VectorXcd y5 =
                y + h * (b1 * s.k1 + b3 * s.k3 + b4 * s.k4 + b5 * s.k5 + b6 * s.k6);
            const double D5 = D + h * (b1 * s.g1 + b3 * s.g3 + b4 * s.g4 + b5 * s.g5 + b6 * s.g6);
            s.k7 = rhs(t + h, y5);
            s.g7 = quad(y5);

            if (!y5.allFinite())
                throw NonFiniteState("integrate: state became non-finite at t = " + std::to_string(t));

            bool accept = true;
            if (!opt.fixed_step) {
                const VectorXcd err = h * (e1 * s.k1 + e3 * s.k3 + e4 * s.k4 + e5 * s.k5 +
                                           e6 * s.k6 + e7 * s.k7);
                const double errD =
                    std::abs(h * (e1 * s.g1 + e3 * s.g3 + e4 * s.g4 + e5 * s.g5 + e6 * s.g6 +
                                  e7 * s.g7));
                const double scale =
                    atol + rtol * std::max(y.cwiseAbs().maxCoeff(), y5.cwiseAbs().maxCoeff());
                const double err_norm =
                    std::max(err.cwiseAbs().maxCoeff(), errD) / scale;
                accept = err_norm <= 1.0;
                const double fac =
                    std::clamp(0.9 * std::pow(std::max(err_norm, 1e-10), -0.2), 0.2, 5.0);
                if (accept) {
                    if (!clamped) h_prop = h * fac;
                } else {
                    ++rec.rejected_steps;
                    h_prop = h * std::min(fac, 0.9);
                    continue;
                }
            }
            (void)accept;
            t += h;
            y = y5;
            D = D5;
            k1 = s.k7;
            g1 = s.g7;
            ++rec.accepted_steps;
        }
        t = target;  // squash accumulated roundoff at the sample point
        push_sample(t, y, D);
    }
    return rec;
}

MonitorReport monitor(const TrajectoryRecord& traj, const LatticeConfig& cfg) {
    MonitorReport rep;
    rep.accepted_steps = traj.accepted_steps;
    rep.rejected_steps = traj.rejected_steps;
    if (traj.times.empty()) return rep;
    const double H0 = traj.hamiltonians.front();
    const double N0 = traj.norms_sq.front();
    double trap = 0.0;
    auto integrand = [&](size_t k) {
        return 2.0 * cfg.gamma * cfg.eps * std::norm(traj.states[k](cfg.n - 1));
    };
    for (size_t k = 0; k < traj.times.size(); ++k) {
        rep.H_drift = std::max(rep.H_drift, std::abs(traj.hamiltonians[k] - H0));
        rep.norm_identity_residual = std::max(
            rep.norm_identity_residual, std::abs(traj.norms_sq[k] - N0 + traj.diss_integral[k]));
        if (k > 0) {
            trap += 0.5 * (traj.times[k] - traj.times[k - 1]) * (integrand(k) + integrand(k - 1));
            rep.norm_identity_residual_trap = std::max(
                rep.norm_identity_residual_trap, std::abs(traj.norms_sq[k] - N0 + trap));
        }
    }
    rep.norm_identity_ok = rep.norm_identity_residual <= 1e-9;
    rep.energy_ok = cfg.gamma > 0 || rep.H_drift <= 1e-9;
    return rep;
}

}  // namespace dnls
