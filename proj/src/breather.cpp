#include "dnls/breather.hpp"

#include <Eigen/LU>

namespace dnls {

VectorXd breather_seed(int n) {
    if (n < 2) throw DimensionError("breather_seed: n must be >= 2");
    VectorXd p = VectorXd::Zero(n);
    p(0) = 1.0;
    return p;
}

VectorXd residual_F(const VectorXd& p, double phi0, double eps) {
    return -eps * laplacian(p) - (1.0 + phi0) * p + p.array().cube().matrix();
}

MatrixXd residual_jacobian(const VectorXd& p, double phi0, double eps) {
    const Eigen::Index n = p.size();
    MatrixXd J = MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double deg = (j == 0 || j == n - 1) ? 1.0 : 2.0;
        J(j, j) = eps * deg - (1.0 + phi0) + 3.0 * p(j) * p(j);
        if (j > 0) J(j, j - 1) = -eps;
        if (j + 1 < n) J(j, j + 1) = -eps;
    }
    return J;
}

namespace {

// Newton polish at fixed (phi0, eps). Returns true on convergence.
bool newton(VectorXd& p, double phi0, double eps, double tol, int max_iter) {
    for (int it = 0; it < max_iter; ++it) {
        const VectorXd F = residual_F(p, phi0, eps);
        if (F.norm() <= tol) return true;
        const MatrixXd J = residual_jacobian(p, phi0, eps);
        Eigen::PartialPivLU<MatrixXd> lu(J);
        if (lu.rcond() < 1e-14)
            throw JacobianSingular("solve_breather: Jacobian numerically singular");
        p -= lu.solve(F);
        if (!p.allFinite()) return false;
    }
    return residual_F(p, phi0, eps).norm() <= tol;
}

}  // namespace

namespace {

// Guard against basin escape: the single-site branch has p1 near 1 and a
// geometrically decaying tail. Near the fold (|eps| ~ 0.2 for larger n)
// Newton can land on delocalized roots with residual below tolerance.
void check_localized_branch(const VectorXd& p, double eps) {
    if (std::abs(p(0)) < 0.5)
        throw NonConvergence("solve_breather: converged off the single-site branch (|p1| < 0.5)");
    (void)eps;
    for (Eigen::Index j = 0; j + 1 < p.size(); ++j)
        if (std::abs(p(j + 1)) > 0.5 * std::abs(p(j)) + 1e-11)
            throw NonConvergence("solve_breather: converged off the localized branch");
}

}  // namespace

BreatherProfile solve_breather_from(const LatticeConfig& cfg, double phi0, const VectorXd& guess) {
    if (guess.size() != cfg.n) throw DimensionError("solve_breather_from: guess length != n");
    VectorXd p = guess;
    if (!newton(p, phi0, cfg.eps, cfg.newton_tol, 50))
        throw NonConvergence("solve_breather_from: Newton did not converge");
    if (p(0) < 0) p = -p;  // branch selection, -p is the gauge image
    check_localized_branch(p, cfg.eps);
    BreatherProfile prof;
    prof.phi0 = phi0;
    prof.eps = cfg.eps;
    prof.p = p;
    prof.residual = residual_F(p, phi0, cfg.eps).norm();
    prof.dp_dphi = Eigen::PartialPivLU<MatrixXd>(residual_jacobian(p, phi0, cfg.eps)).solve(p);
    return prof;
}

BreatherProfile solve_breather(const LatticeConfig& cfg, double phi0) {
    cfg.validate();
    if (std::abs(phi0) > 0.25)
        throw ConfigError("solve_breather: |phi0| must be <= 0.25");
    try {
        return solve_breather_from(cfg, phi0, breather_seed(cfg.n));
    } catch (const NonConvergence&) {
        // continuation from the decoupled limit
    }
    VectorXd p = breather_seed(cfg.n);
    const double de = 0.05 * (cfg.eps >= 0 ? 1.0 : -1.0);
    double e = 0.0;
    while (std::abs(e - cfg.eps) > 1e-15) {
        e = (std::abs(cfg.eps - e) <= 0.05) ? cfg.eps : e + de;
        if (!newton(p, phi0, e, cfg.newton_tol, 50))
            throw NonConvergence("solve_breather: continuation stalled at eps = " + std::to_string(e));
    }
    return solve_breather_from(cfg, phi0, p);
}

VectorXd breather_derivative(const BreatherProfile& profile, const LatticeConfig& cfg) {
    const MatrixXd B = residual_jacobian(profile.p, profile.phi0, profile.eps);
    Eigen::PartialPivLU<MatrixXd> lu(B);
    if (lu.rcond() < 1e-14)
        throw JacobianSingular("breather_derivative: B numerically singular");
    (void)cfg;
    return lu.solve(profile.p);
}

VectorXd asymptotic_profile(const LatticeConfig& cfg, double phi0) {
    VectorXd p(cfg.n);
    p(0) = 1.0 + 0.5 * (phi0 - cfg.eps);
    double t = 1.0;
    for (int j = 1; j < cfg.n; ++j) {
        t *= -cfg.eps;
        p(j) = t;
    }
    return p;
}

}  // namespace dnls
