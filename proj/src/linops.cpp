#include "dnls/linops.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <limits>

namespace dnls {

MatrixXd laplacian_matrix(int n) {
    if (n < 2) throw DimensionError("laplacian_matrix: n must be >= 2");
    MatrixXd D = MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        D(j, j) = (j == 0 || j == n - 1) ? -1.0 : -2.0;
        if (j > 0) D(j, j - 1) = 1.0;
        if (j + 1 < n) D(j, j + 1) = 1.0;
    }
    return D;
}

MatrixXd build_A(const BreatherProfile& profile, const LatticeConfig& cfg) {
    const int n = cfg.n;
    if (profile.p.size() != n) throw DimensionError("build_A: profile/config mismatch");
    MatrixXd A = cfg.eps * laplacian_matrix(n);
    A.diagonal().array() += 1.0 + profile.phi0;
    A.diagonal() -= profile.p.array().square().matrix();
    return A;
}

MatrixXd build_B(const BreatherProfile& profile, const LatticeConfig& cfg) {
    const int n = cfg.n;
    if (profile.p.size() != n) throw DimensionError("build_B: profile/config mismatch");
    MatrixXd B = -cfg.eps * laplacian_matrix(n);
    B.diagonal().array() -= 1.0 + profile.phi0;
    B.diagonal() += 3.0 * profile.p.array().square().matrix();
    return B;
}

MatrixXd build_M(const BreatherProfile& profile, const LatticeConfig& cfg) {
    const int n = cfg.n;
    MatrixXd M = MatrixXd::Zero(2 * n, 2 * n);
    M.topRightCorner(n, n) = build_A(profile, cfg);
    M.bottomLeftCorner(n, n) = build_B(profile, cfg);
    return M;
}

MatrixXd build_Gamma(const LatticeConfig& cfg) {
    const int n = cfg.n;
    MatrixXd G = MatrixXd::Zero(2 * n, 2 * n);
    G(n - 1, n - 1) = cfg.gamma * cfg.eps;
    G(2 * n - 1, 2 * n - 1) = cfg.gamma * cfg.eps;
    return G;
}

MatrixXd build_L(const BreatherProfile& profile, const LatticeConfig& cfg) {
    return build_M(profile, cfg) - build_Gamma(cfg);
}

void zero_modes(const BreatherProfile& profile, const LatticeConfig& cfg,
                VectorXd& v1, VectorXd& v2, VectorXd& n1, VectorXd& n2) {
    const int n = cfg.n;
    const MatrixXd B = build_B(profile, cfg);
    Eigen::PartialPivLU<MatrixXd> lu(B);
    if (lu.rcond() < 1e-14) throw JacobianSingular("zero_modes: B numerically singular");
    const VectorXd Binv_p = lu.solve(profile.p);
    const double pBp = profile.p.dot(Binv_p);
    if (std::abs(pBp) < 1e-14) throw JacobianSingular("zero_modes: p.B^{-1}p vanishes");
    const double c = 1.0 / pBp;
    v1 = VectorXd::Zero(2 * n);
    v1.tail(n) = profile.p;
    v2 = VectorXd::Zero(2 * n);
    v2.head(n) = Binv_p;
    n1 = VectorXd::Zero(2 * n);
    n1.tail(n) = c * Binv_p;
    n2 = VectorXd::Zero(2 * n);
    n2.head(n) = c * profile.p;
}

LinearPack make_pack(const BreatherProfile& profile, const LatticeConfig& cfg) {
    LinearPack pk;
    pk.profile = profile;
    pk.phi0 = profile.phi0;
    pk.eps = cfg.eps;
    pk.gamma = cfg.gamma;
    pk.A = build_A(profile, cfg);
    pk.B = build_B(profile, cfg);
    const int n = cfg.n;
    pk.M = MatrixXd::Zero(2 * n, 2 * n);
    pk.M.topRightCorner(n, n) = pk.A;
    pk.M.bottomLeftCorner(n, n) = pk.B;
    pk.Gamma = build_Gamma(cfg);
    pk.L = pk.M - pk.Gamma;
    zero_modes(profile, cfg, pk.v1, pk.v2, pk.n1, pk.n2);
    pk.Q = pk.v1 * pk.n1.transpose() + pk.v2 * pk.n2.transpose();
    pk.P = MatrixXd::Identity(2 * n, 2 * n) - pk.Q;
    return pk;
}

LinearPack make_pack(const LatticeConfig& cfg, double phi0) {
    return make_pack(solve_breather(cfg, phi0), cfg);
}

MatrixXcd transform_X(int n) {
    if (n < 2) throw DimensionError("transform_X: n must be >= 2");
    const double s = 1.0 / std::sqrt(2.0);
    const Complex is(0.0, s);
    MatrixXcd X = MatrixXcd::Zero(2 * n, 2 * n);
    X(n, 0) = 1.0;
    X(0, 1) = 1.0;
    for (int k = 1; k < n; ++k) {
        X(k, 1 + k) = s;
        X(n + k, 1 + k) = is;
        X(k, n + k) = s;
        X(n + k, n + k) = -is;
    }
    return X;
}

namespace {

// eps-derivative of M at eps = 0, phi0 = 0. Tridiagonal stencils: the A-block
// has diagonal (0, -2, ..., -2, -1) with +1 off the diagonal, the B-block has
// (-2, 2, ..., 2, 1) with -1 off the diagonal.
MatrixXd e1_stencil(int n) {
    MatrixXd dA = MatrixXd::Zero(n, n), dB = MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        if (j == 0) {
            dA(j, j) = 0.0;
            dB(j, j) = -2.0;
        } else if (j == n - 1) {
            dA(j, j) = -1.0;
            dB(j, j) = 1.0;
        } else {
            dA(j, j) = -2.0;
            dB(j, j) = 2.0;
        }
        if (j > 0) { dA(j, j - 1) = 1.0; dB(j, j - 1) = -1.0; }
        if (j + 1 < n) { dA(j, j + 1) = 1.0; dB(j, j + 1) = -1.0; }
    }
    MatrixXd K = MatrixXd::Zero(2 * n, 2 * n);
    K.topRightCorner(n, n) = dA;
    K.bottomLeftCorner(n, n) = dB;
    return K;
}

}  // namespace

PerturbationSplit perturbation_split(const BreatherProfile& profile, const LatticeConfig& cfg) {
    const int n = cfg.n;
    const double one_phi = 1.0 + profile.phi0;
    PerturbationSplit out;

    // at eps = 0 the profile is sqrt(1+phi0) e_1, so the corner entries are
    // exactly 0 and +2(1+phi0)
    MatrixXd A0 = MatrixXd::Zero(n, n), B0 = MatrixXd::Zero(n, n);
    A0.diagonal().setConstant(one_phi);
    A0(0, 0) = 0.0;
    B0.diagonal().setConstant(-one_phi);
    B0(0, 0) = 2.0 * one_phi;
    out.M_phi0_0 = MatrixXd::Zero(2 * n, 2 * n);
    out.M_phi0_0.topRightCorner(n, n) = A0;
    out.M_phi0_0.bottomLeftCorner(n, n) = B0;

    out.E1 = cfg.eps * e1_stencil(n);
    out.E2 = build_M(profile, cfg) - out.M_phi0_0 - out.E1;

    const MatrixXcd X = transform_X(n);
    const MatrixXcd E1_hat = X.adjoint() * out.E1.cast<Complex>() * X;
    // blocks in the hat basis: {0,1}, {2..n}, {n+1..2n-1}
    auto block_of = [n](int i) {
        if (i < 2) return 0;
        if (i <= n) return 1;
        return 2;
    };
    out.E11_hat = MatrixXcd::Zero(2 * n, 2 * n);
    out.E12_hat = MatrixXcd::Zero(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
        for (int j = 0; j < 2 * n; ++j) {
            if (block_of(i) == block_of(j))
                out.E11_hat(i, j) = E1_hat(i, j);
            else
                out.E12_hat(i, j) = E1_hat(i, j);
        }
    return out;
}

TridiagonalReport tridiagonal_check(const MatrixXd& U) {
    const Eigen::Index m = U.rows();
    if (U.cols() != m || m < 1) throw DimensionError("tridiagonal_check: square matrix required");
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            if (std::abs(i - j) > 1 && U(i, j) != 0.0)
                throw DimensionError("tridiagonal_check: matrix is not tridiagonal");
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
        if (U(i, i + 1) != U(i + 1, i))
            throw DimensionError("tridiagonal_check: matrix is not symmetric");
        if (U(i, i + 1) == 0.0)
            throw ZeroOffDiagonal("tridiagonal_check: zero off-diagonal entry");
    }

    TridiagonalReport rep;
    if (m == 1) {
        rep.simple = true;
        rep.min_gap = std::numeric_limits<double>::infinity();
        rep.first_last_nonzero = true;
        rep.eigenvalues = U.diagonal();
        return rep;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(U);
    if (es.info() != Eigen::Success) throw SolverFailure("tridiagonal_check: eigensolver failed");
    rep.eigenvalues = es.eigenvalues();
    rep.min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i + 1 < m; ++i)
        rep.min_gap = std::min(rep.min_gap, rep.eigenvalues(i + 1) - rep.eigenvalues(i));
    rep.simple = rep.min_gap > 0.0;
    rep.first_last_nonzero = true;
    for (Eigen::Index k = 0; k < m; ++k) {
        const VectorXd x = es.eigenvectors().col(k);
        const double thresh = 1e-10 * x.norm();
        if (std::abs(x(0)) <= thresh || std::abs(x(m - 1)) <= thresh)
            rep.first_last_nonzero = false;
    }
    return rep;
}

}  // namespace dnls
