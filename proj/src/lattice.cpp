#include "dnls/lattice.hpp"

namespace dnls {

namespace {
void check_len(Eigen::Index len, const char* who) {
    if (len < 2) throw DimensionError(std::string(who) + ": vector length must be >= 2");
}
}  // namespace

VectorXd to_real(const VectorXcd& w) {
    const Eigen::Index n = w.size();
    VectorXd z(2 * n);
    z.head(n) = w.real();
    z.tail(n) = w.imag();
    return z;
}

VectorXcd to_complex(const VectorXd& z) {
    if (z.size() % 2 != 0) throw DimensionError("to_complex: length must be even");
    const Eigen::Index n = z.size() / 2;
    VectorXcd w(n);
    w.real() = z.head(n);
    w.imag() = z.tail(n);
    return w;
}

template <typename Vec>
static Vec laplacian_impl(const Vec& u) {
    check_len(u.size(), "laplacian");
    const Eigen::Index n = u.size();
    Vec r(n);
    r(0) = -u(0) + u(1);
    for (Eigen::Index j = 1; j + 1 < n; ++j) r(j) = u(j - 1) - 2.0 * u(j) + u(j + 1);
    r(n - 1) = u(n - 2) - u(n - 1);
    return r;
}

VectorXcd laplacian(const VectorXcd& u) { return laplacian_impl(u); }
VectorXd laplacian(const VectorXd& u) { return laplacian_impl(u); }

VectorXcd rhs_complex(const VectorXcd& w, const LatticeConfig& cfg, double phi_shift) {
    if (w.size() != cfg.n) throw DimensionError("rhs_complex: state length != cfg.n");
    const Complex I(0.0, 1.0);
    VectorXcd dw = -I * cfg.eps * laplacian(w) - I * (1.0 + phi_shift) * w;
    dw += I * (w.array() * w.array().abs2()).matrix();
    dw(cfg.n - 1) -= cfg.gamma * cfg.eps * w(cfg.n - 1);
    return dw;
}

VectorXd rhs_real(const VectorXd& z, const LatticeConfig& cfg, double phi0) {
    const int n = cfg.n;
    if (z.size() != 2 * n) throw DimensionError("rhs_real: state length != 2n");
    const VectorXd p = z.head(n), q = z.tail(n);
    const VectorXd lp = laplacian(p), lq = laplacian(q);
    const VectorXd r2 = p.array().square() + q.array().square();
    VectorXd dz(2 * n);
    // q' = -eps Δp - (1+phi0) p + (p^2+q^2) p - δ_n gamma eps q
    // p' = +eps Δq + (1+phi0) q - (p^2+q^2) q - δ_n gamma eps p
    VectorXd dq = -cfg.eps * lp - (1.0 + phi0) * p + (r2.array() * p.array()).matrix();
    VectorXd dp = cfg.eps * lq + (1.0 + phi0) * q - (r2.array() * q.array()).matrix();
    dq(n - 1) -= cfg.gamma * cfg.eps * q(n - 1);
    dp(n - 1) -= cfg.gamma * cfg.eps * p(n - 1);
    dz.head(n) = dp;
    dz.tail(n) = dq;
    return dz;
}

double hamiltonian(const VectorXd& z, const LatticeConfig& cfg) {
    const int n = cfg.n;
    if (z.size() != 2 * n) throw DimensionError("hamiltonian: state length != 2n");
    const auto p = z.head(n), q = z.tail(n);
    double coupling = 0.0;
    for (int j = 0; j + 1 < n; ++j) {
        const double dp = p(j) - p(j + 1), dq = q(j) - q(j + 1);
        coupling += dp * dp + dq * dq;
    }
    double onsite = 0.0;
    for (int j = 0; j < n; ++j) {
        const double r2 = p(j) * p(j) + q(j) * q(j);
        onsite += 0.5 * r2 - 0.25 * r2 * r2;
    }
    return 0.5 * cfg.eps * coupling - onsite;
}

double hamiltonian(const VectorXcd& w, const LatticeConfig& cfg) {
    return hamiltonian(to_real(w), cfg);
}

VectorXd gauge_rotate(const VectorXd& z, double theta) {
    if (z.size() % 2 != 0) throw DimensionError("gauge_rotate: length must be even");
    const Eigen::Index n = z.size() / 2;
    const double c = std::cos(theta), s = std::sin(theta);
    VectorXd out(2 * n);
    out.head(n) = c * z.head(n) - s * z.tail(n);
    out.tail(n) = s * z.head(n) + c * z.tail(n);
    return out;
}

VectorXcd gauge_rotate(const VectorXcd& w, double theta) {
    return std::exp(Complex(0.0, theta)) * w;
}

double norm_decay_rate(const VectorXcd& w, const LatticeConfig& cfg) {
    if (w.size() != cfg.n) throw DimensionError("norm_decay_rate: state length != cfg.n");
    return -2.0 * cfg.gamma * cfg.eps * std::norm(w(cfg.n - 1));
}

}  // namespace dnls
