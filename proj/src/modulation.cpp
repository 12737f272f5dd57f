#include "dnls/modulation.hpp"

#include <Eigen/LU>
#include <cmath>
#include <numbers>

namespace dnls {

namespace {

VectorXcd phase_rotate(const VectorXcd& w, double angle) {
    return std::exp(Complex(0.0, angle)) * w;
}

// Remainder of W against the cylinder point (phi, theta) at time t.
VectorXd remainder(const VectorXcd& W, double t, double phi, double theta, const VectorXd& p) {
    const VectorXcd z = phase_rotate(W, -(t * phi + theta)) - p.cast<Complex>();
    return to_real(z);
}

double gauge_aligned_distance(const VectorXcd& W, const VectorXd& p) {
    const Complex overlap = p.cast<Complex>().dot(W);
    const double alpha = std::arg(overlap);
    return (phase_rotate(W, -alpha) - p.cast<Complex>()).norm();
}

}  // namespace

VectorXcd reconstruct(const ModulationFrame& frame, const LatticeConfig& cfg) {
    LatticeConfig c = cfg;
    c.newton_tol = std::min(cfg.newton_tol, 1e-14);
    const BreatherProfile prof = solve_breather(c, frame.phi);
    if (frame.zeta.size() != 2 * cfg.n)
        throw DimensionError("reconstruct: zeta length != 2n");
    const VectorXcd z = to_complex(frame.zeta);
    return phase_rotate(prof.p.cast<Complex>() + z, frame.t * frame.phi + frame.theta);
}

ModulationFrame decompose_fixed_frame(const VectorXcd& W, double t, const LinearPack& base,
                                      double phi_guess, double theta_guess,
                                      const LatticeConfig& cfg) {
    if (W.size() != cfg.n) throw DimensionError("decompose_fixed_frame: state length != cfg.n");
    if (gauge_aligned_distance(W, base.profile.p) > 0.1)
        throw NonConvergence("decompose_fixed_frame: state too far from the breather cylinder");

    double phi = phi_guess, theta = theta_guess;
    VectorXd p_warm = base.profile.p;
    VectorXd zeta;
    const int n = cfg.n;
    // the profile enters the constraint residuals, so it has to be converged
    // well below the 1e-13 target
    LatticeConfig c = cfg;
    c.newton_tol = std::min(cfg.newton_tol, 1e-14);
    for (int it = 0; it < 40; ++it) {
        const BreatherProfile prof = solve_breather_from(c, phi, p_warm);
        p_warm = prof.p;
        const VectorXcd z = phase_rotate(W, -(t * phi + theta)) - prof.p.cast<Complex>();
        zeta = to_real(z);
        const double r1 = base.n1.dot(zeta);
        const double r2 = base.n2.dot(zeta);
        if (std::max(std::abs(r1), std::abs(r2)) <= 1e-13) {
            ModulationFrame fr;
            fr.t = t;
            fr.phi = phi;
            fr.theta = theta;
            fr.zeta = zeta;
            fr.base_phi = base.phi0;
            return fr;
        }
        // analytic Jacobian: d zeta/d theta = vec(-i(p+z)), d zeta/d phi adds
        // -(dp/dphi, 0) to t * vec(-i(p+z))
        VectorXd dth(2 * n);
        dth.head(n) = z.imag();
        dth.tail(n) = -(prof.p + z.real().matrix()).eval();
        VectorXd dph = t * dth;
        dph.head(n) -= prof.dp_dphi;
        Eigen::Matrix2d J;
        J << base.n1.dot(dph), base.n1.dot(dth), base.n2.dot(dph), base.n2.dot(dth);
        const Eigen::Vector2d rhs(r1, r2);
        const Eigen::Vector2d step = J.partialPivLu().solve(rhs);
        if (!step.allFinite())
            throw NonConvergence("decompose_fixed_frame: singular constraint Jacobian");
        phi -= step(0);
        theta -= step(1);
        if (std::abs(phi - base.phi0) > 0.2)
            throw NonConvergence("decompose_fixed_frame: phi escaped the admissible box");
    }
    throw NonConvergence("decompose_fixed_frame: Newton did not reach tolerance");
}

ModulationFrame reorthogonalize(const VectorXcd& W, double t, double phi_guess,
                                double theta_guess, const LatticeConfig& cfg) {
    if (W.size() != cfg.n) throw DimensionError("reorthogonalize: state length != cfg.n");

    LatticeConfig c = cfg;
    c.newton_tol = std::min(cfg.newton_tol, 1e-14);
    VectorXd p_warm;
    auto residual = [&](double phi, double theta, VectorXd& zeta_out) -> Eigen::Vector2d {
        const BreatherProfile prof = p_warm.size() == cfg.n
                                         ? solve_breather_from(c, phi, p_warm)
                                         : solve_breather(c, phi);
        p_warm = prof.p;
        VectorXd v1, v2, n1, n2;
        zero_modes(prof, cfg, v1, v2, n1, n2);
        zeta_out = remainder(W, t, phi, theta, prof.p);
        return {n1.dot(zeta_out), n2.dot(zeta_out)};
    };

    VectorXd zeta;
    {
        const Eigen::Vector2d r0 = residual(phi_guess, theta_guess, zeta);
        (void)r0;
        if (zeta.norm() > 0.05)
            throw OutOfNeighborhood("reorthogonalize: remainder exceeds the 0.05 neighborhood");
    }

    double phi = phi_guess, theta = theta_guess;
    const double h = 1e-7;
    for (int it = 0; it < 40; ++it) {
        const Eigen::Vector2d r = residual(phi, theta, zeta);
        if (std::max(std::abs(r(0)), std::abs(r(1))) <= 1e-13) {
            ModulationFrame fr;
            fr.t = t;
            fr.phi = phi;
            fr.theta = theta;
            fr.zeta = zeta;
            fr.base_phi = phi;
            return fr;
        }
        VectorXd scratch;
        const double hp = h / (1.0 + std::abs(t));
        const Eigen::Vector2d rp = residual(phi + hp, theta, scratch);
        const Eigen::Vector2d rm = residual(phi - hp, theta, scratch);
        const Eigen::Vector2d rtp = residual(phi, theta + h, scratch);
        const Eigen::Vector2d rtm = residual(phi, theta - h, scratch);
        Eigen::Matrix2d J;
        J.col(0) = (rp - rm) / (2.0 * hp);
        J.col(1) = (rtp - rtm) / (2.0 * h);
        const Eigen::Vector2d step = J.partialPivLu().solve(r);
        if (!step.allFinite())
            throw NonConvergence("reorthogonalize: singular constraint Jacobian");
        phi -= step(0);
        theta -= step(1);
    }
    throw NonConvergence("reorthogonalize: Newton did not reach tolerance");
}

double stopping_time(const LatticeConfig& cfg, const SemigroupConstants& k) {
    if (!(k.kappa_n > 0)) throw NonPositiveDamping("stopping_time: kappa_n must be positive");
    double T = 8.0 * k.C_n / (k.kappa_n * std::abs(cfg.eps));
    if (cfg.gamma > 0) {
        // enforce (1 + 1.5 C_n γ) exp(-κ γ eps T / 4) <= 1
        const double T_need = 4.0 * std::log1p(1.5 * k.C_n * cfg.gamma) /
                              (k.kappa_n * cfg.gamma * std::abs(cfg.eps));
        T = std::max(T, T_need);
    }
    return T;
}

std::pair<EpochReport, ModulationFrame> run_epoch(const ModulationFrame& frame0,
                                                  const LatticeConfig& cfg,
                                                  const SemigroupConstants& constants,
                                                  std::vector<EpochSample>* samples) {
    cfg.validate();
    const int n = cfg.n;
    const double eps_n = std::pow(std::abs(cfg.eps), n);
    const double ball = cfg.gamma * eps_n;
    // at gamma = 0 the cylinder is invariant and the only normal motion is
    // integrator drift; give the comparisons a 1e-9 allowance for it
    const double floor = cfg.gamma == 0.0 ? 1e-9 : 0.0;
    if (frame0.zeta.size() != 2 * n) throw DimensionError("run_epoch: zeta length != 2n");
    // admissible a-priori ball is 2 gamma eps^n; the damping forces a normal
    // component ~ 1.2 gamma eps^n even from zeta0 = 0, so restart frames can
    // sit slightly outside the nominal gamma eps^n ball
    if (frame0.zeta.norm() > 2.0 * ball * (1.0 + 1e-9) + floor + 1e-300)
        throw OutOfNeighborhood("run_epoch: ||zeta0|| must be <= 2 gamma eps^n");

    const double T = stopping_time(cfg, constants);
    const double dt = std::min(0.5, T / 2000.0);
    const LinearPack base = make_pack(cfg, frame0.base_phi);

    // orthogonality of the incoming frame
    const double ortho = std::max(std::abs(base.n1.dot(frame0.zeta)),
                                  std::abs(base.n2.dot(frame0.zeta)));
    if (ortho > 1e-10 * frame0.zeta.norm() + 1e-12)
        throw OutOfNeighborhood("run_epoch: frame violates the orthogonality constraint");

    const double t0 = frame0.t;
    const VectorXcd W0 = reconstruct(frame0, cfg);
    const VectorXcd V0 = phase_rotate(W0, -frame0.base_phi * t0);
    const Rhs rhs = make_rhs(cfg, frame0.base_phi);
    const TrajectoryRecord traj = integrate(rhs, V0, t0, t0 + T, cfg, dt);

    EpochReport rep;
    rep.T = T;
    const double drift_rate = 2.0 * cfg.gamma * std::pow(std::abs(cfg.eps), 2 * n - 1);

    double phi = frame0.phi, theta = frame0.theta;
    double s = 0.0, phi_integral = 0.0;
    double prev_t = t0, prev_phi = frame0.phi;
    const double theta0_total = t0 * frame0.phi + frame0.theta;
    ModulationFrame fr;
    for (size_t k = 0; k < traj.times.size(); ++k) {
        const double t = traj.times[k];
        const VectorXcd W = phase_rotate(traj.states[k], frame0.base_phi * t);
        fr = decompose_fixed_frame(W, t, base, phi, theta, cfg);
        phi = fr.phi;
        theta = fr.theta;
        phi_integral += 0.5 * (t - prev_t) * (phi + prev_phi);
        s = (t * phi + theta) - theta0_total - phi_integral;
        prev_t = t;
        prev_phi = phi;
        const double zn = fr.zeta.norm();
        rep.zeta_norm_max = std::max(rep.zeta_norm_max, zn);
        if (zn > 4.0 * ball + floor)
            throw CeilingExceeded("run_epoch: ||zeta|| exceeded 4 gamma eps^n at t = " +
                                  std::to_string(t));
        if (samples) {
            EpochSample smp;
            smp.t = t;
            smp.winding_phase = t * phi + theta;
            smp.phi = phi;
            smp.theta = theta;
            smp.zeta_norm = zn;
            smp.delta = phi - frame0.base_phi;
            smp.s = s;
            samples->push_back(smp);
        }
    }
    rep.zeta_norm_end = fr.zeta.norm();
    rep.delta_T = phi - frame0.base_phi;
    rep.s_T = s;
    rep.phi_shift_measured = rep.delta_T;

    // gauge-normalize the total phase, then re-base the decomposition
    const double t_end = t0 + T;
    const double total_phase = t_end * phi + theta;
    rep.total_phase_T = total_phase;
    const VectorXcd W_end = phase_rotate(traj.states.back(), frame0.base_phi * t_end);
    const VectorXcd W_next = phase_rotate(W_end, -total_phase);
    ModulationFrame next = reorthogonalize(W_next, 0.0, phi, 0.0, cfg);
    next.s = 0.0;
    rep.zeta_norm_after_reproj = next.zeta.norm();
    rep.phi_new = next.phi;

    rep.pass_interior = rep.zeta_norm_max <= 2.0 * ball + floor;
    rep.pass_reproj = rep.zeta_norm_after_reproj <= ball + floor;
    rep.pass_drift = std::abs(rep.delta_T + drift_rate * T) <=
                     2.0 * cfg.gamma * std::pow(std::abs(cfg.eps), 2 * n - 0.5) * T + floor;
    return {rep, next};
}

EpochChain iterate_epochs(const ModulationFrame& frame0, int K, const LatticeConfig& cfg,
                          const SemigroupConstants& constants, bool keep_samples) {
    if (K < 1) throw ConfigError("iterate_epochs: K must be >= 1");
    const int n = cfg.n;
    const double eps_n = std::pow(std::abs(cfg.eps), n);
    const double drift_rate = 2.0 * cfg.gamma * std::pow(std::abs(cfg.eps), 2 * n - 1);
    const double T = stopping_time(cfg, constants);

    EpochChain chain;
    chain.phi_k.push_back(frame0.phi);
    ModulationFrame fr = frame0;
    double t_offset = 0.0, phase_offset = 0.0;
    for (int k = 0; k < K; ++k) {
        if (static_cast<double>(k + 1) * drift_rate * T > cfg.gamma * eps_n) {
            chain.window_exceeded = true;
            break;
        }
        std::vector<EpochSample> local;
        auto [rep, next] = run_epoch(fr, cfg, constants, keep_samples ? &local : nullptr);
        if (keep_samples) {
            for (EpochSample& smp : local) {
                smp.t += t_offset;
                smp.winding_phase += phase_offset;
                chain.samples.push_back(smp);
            }
        }
        // keep the winding phase continuous across the end-of-epoch gauge rotation:
        // the next epoch starts with inner phase theta_hat in place of total_phase_T
        phase_offset += rep.total_phase_T - next.theta;
        t_offset += rep.T;
        chain.reports.push_back(rep);
        chain.phi_k.push_back(next.phi);
        fr = next;
    }
    return chain;
}

LemmaResiduals lemma_residuals(const LinearPack& base, const BreatherProfile& at_phi,
                               const VectorXd& zeta, const LatticeConfig& cfg) {
    const int n = cfg.n;
    if (zeta.size() != 2 * n) throw DimensionError("lemma_residuals: zeta length != 2n");
    const VectorXd xi = zeta.head(n), eta = zeta.tail(n);
    const double ge = cfg.gamma * cfg.eps;

    LemmaResiduals out;
    const MatrixXd U = build_M(at_phi, cfg);
    const VectorXd Uz = U * zeta;
    out.termU2 = base.n2.dot(Uz);
    out.termU1 = base.n1.dot(Uz);
    out.termUP = (base.P * Uz - Uz).norm();

    VectorXd gvec = VectorXd::Zero(2 * n);
    gvec(n - 1) = -ge * (xi(n - 1) + at_phi.p(n - 1));
    gvec(2 * n - 1) = -ge * eta(n - 1);
    out.t2 = base.n2.dot(gvec);
    out.t2a = base.n1.dot(gvec);
    const VectorXd Gz = base.Gamma * zeta;
    out.t2P = (base.P * Gz - Gz).norm();

    VectorXd tvec(2 * n);
    tvec.head(n) = eta;
    tvec.tail(n) = -xi - at_phi.p;
    out.t3 = base.n2.dot(tvec);
    out.t3b = base.n1.dot(tvec);
    const VectorXd Pt = base.P * tvec;
    out.t3c_first = Pt.head(n).norm();
    out.t3c_second = Pt.tail(n).norm();

    VectorXd pvec = VectorXd::Zero(2 * n);
    pvec.head(n) = -at_phi.dp_dphi;
    out.t4 = base.n2.dot(pvec);
    out.t4b = base.n1.dot(pvec);
    const VectorXd Pp = base.P * pvec;
    out.t4c_first = Pp.head(n).norm();
    out.t4c_second = Pp.tail(n).norm();
    return out;
}

WindingResult winding_times(const LatticeConfig& cfg, int m_max) {
    cfg.validate();
    if (m_max < 1) throw ConfigError("winding_times: m_max must be >= 1");
    const int n = cfg.n;
    const double rate = cfg.gamma * std::pow(std::abs(cfg.eps), 2 * n - 1);
    if (!(rate > 0)) throw ConfigError("winding_times: gamma and eps must be nonzero");

    WindingResult out;
    for (int m = 1; m <= m_max; ++m)
        out.predicted.push_back(std::sqrt(2.0 * std::numbers::pi * m / rate));
    const double t_end = 1.4 * out.predicted.back();

    const BreatherProfile prof = solve_breather(cfg, 0.0);
    const LinearPack base = make_pack(prof, cfg);
    const TrajectoryRecord traj =
        integrate(make_rhs(cfg, 0.0), prof.p.cast<Complex>(), 0.0, t_end, cfg, 0.25);

    double phi = 0.0, theta = 0.0;
    double prev_phase = 0.0, prev_t = 0.0;
    size_t next_m = 1;
    for (size_t k = 0; k < traj.times.size() && next_m <= static_cast<size_t>(m_max); ++k) {
        const double t = traj.times[k];
        const ModulationFrame fr = decompose_fixed_frame(traj.states[k], t, base, phi, theta, cfg);
        phi = fr.phi;
        theta = fr.theta;
        const double phase = t * phi + theta;
        while (next_m <= static_cast<size_t>(m_max) &&
               std::abs(phase) >= 2.0 * std::numbers::pi * next_m) {
            // linear interpolation to the crossing
            const double want = 2.0 * std::numbers::pi * next_m;
            const double f = (want - std::abs(prev_phase)) /
                             (std::abs(phase) - std::abs(prev_phase));
            out.measured.push_back(prev_t + f * (t - prev_t));
            ++next_m;
        }
        prev_phase = phase;
        prev_t = t;
    }
    if (out.measured.size() < static_cast<size_t>(m_max))
        throw NonConvergence("winding_times: run too short to observe all requested windings");
    return out;
}

}  // namespace dnls
