#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dnls/spectral.hpp"
#include "helpers.hpp"

using namespace dnls;

namespace {

LatticeConfig make_cfg(int n, double eps, double gamma = 0.0) {
    LatticeConfig cfg;
    cfg.n = n;
    cfg.eps = eps;
    cfg.gamma = gamma;
    return cfg;
}

}  // namespace

TEST_CASE("undamped spectrum: imaginary, simple, with eps-wide gaps") {
    const LatticeConfig cfg = make_cfg(3, 0.1);
    const BreatherProfile prof = solve_breather(cfg, 0.0);
    const SpectrumReport rep = spectrum(build_M(prof, cfg));
    CHECK(rep.max_abs_real_part_undamped <= 1e-10);
    CHECK(rep.min_gap_nonzero > 0.0);
    // conjugation symmetry of the full list
    for (int i = 0; i < rep.eigenvalues.size(); ++i) {
        const Complex ev = rep.eigenvalues(i);
        double best = 1e9;
        for (int j = 0; j < rep.eigenvalues.size(); ++j)
            best = std::min(best, std::abs(std::conj(ev) - rep.eigenvalues(j)));
        CHECK(best <= 1e-10);
    }

    // nonzero modes seen in the transformed basis carry their cluster's last slot
    const MatrixXcd X = transform_X(cfg.n);
    for (int i = 0; i < rep.eigenvalues.size(); ++i) {
        if (i == rep.zero_pair[0] || i == rep.zero_pair[1]) continue;
        const VectorXcd xi = X.adjoint() * rep.eigenvectors.col(i);
        const int slot = rep.eigenvalues(i).imag() > 0 ? cfg.n : 2 * cfg.n - 1;
        CHECK(std::abs(xi(slot)) > 1e-8);
    }
}

TEST_CASE("spectrum across the box stays on the axis") {
    for (int n : {2, 4}) {
        for (double eps : {-0.1, 0.05, 0.16}) {
            for (double phi0 : {0.0, 0.1}) {
                const LatticeConfig cfg = make_cfg(n, eps);
                const SpectrumReport rep =
                    spectrum(build_M(solve_breather(cfg, phi0), cfg));
                CHECK(rep.max_abs_real_part_undamped <= 1e-9);
            }
        }
    }
}

TEST_CASE("gap analysis over the eps sweep") {
    std::vector<std::pair<double, SpectrumReport>> sweep;
    for (double eps : {0.02, 0.04, 0.08, 0.16}) {
        const LatticeConfig cfg = make_cfg(3, eps);
        sweep.emplace_back(eps, spectrum(build_M(solve_breather(cfg, 0.0), cfg)));
    }
    const GapFit fit = gap_analysis(sweep);
    CHECK(fit.intra_valid);
    CHECK(fit.C_lower > 0.0);
    CHECK(std::abs(fit.slope - 1.0) <= 0.1);

    // n = 2: one eigenvalue per cluster, the cross-cluster gap is ~2
    std::vector<std::pair<double, SpectrumReport>> pair_sweep;
    const LatticeConfig c2 = make_cfg(2, 0.1);
    pair_sweep.emplace_back(0.1, spectrum(build_M(solve_breather(c2, 0.0), c2)));
    const GapFit fit2 = gap_analysis(pair_sweep);
    CHECK_FALSE(fit2.intra_valid);
    CHECK(fit2.cross_cluster_gap == doctest::Approx(2.0).epsilon(0.2));

    // a global frequency shift leaves the intra-cluster gaps almost unchanged
    const LatticeConfig c3 = make_cfg(3, 0.1);
    const SpectrumReport r0 = spectrum(build_M(solve_breather(c3, 0.0), c3));
    const SpectrumReport r1 = spectrum(build_M(solve_breather(c3, 0.1), c3));
    CHECK(std::abs(r0.min_gap_nonzero - r1.min_gap_nonzero) <= 5.0 * 0.1 * 0.1);
}

TEST_CASE("damping rates") {
    {
        const LatticeConfig cfg = make_cfg(3, 0.1, 0.0);
        const SpectrumReport rep = damping_rates(solve_breather(cfg, 0.0), cfg);
        CHECK(rep.damping_rates.cwiseAbs().maxCoeff() <= 1e-10);
    }

    const LatticeConfig cfg = make_cfg(3, 0.1, 0.1);
    const BreatherProfile prof = solve_breather(cfg, 0.0);
    const SpectrumReport rep = damping_rates(prof, cfg);
    const double ge = cfg.gamma * cfg.eps;
    for (int i = 0; i < rep.damping_rates.size(); ++i) {
        CHECK(rep.damping_rates(i) > 0.02 * ge);
        CHECK(rep.damping_rates(i) < 3.0 * ge);
    }

    // first-order perturbation oracle: rate ≈ <v, Gamma v> for unit eigenvectors of M
    const SpectrumReport undamped = spectrum(build_M(prof, cfg));
    const MatrixXd G = build_Gamma(cfg);
    for (int i = 0; i < undamped.eigenvalues.size(); ++i) {
        if (i == undamped.zero_pair[0] || i == undamped.zero_pair[1]) continue;
        const VectorXcd v = undamped.eigenvectors.col(i);
        const double predicted = v.dot(G.cast<Complex>() * v).real();
        // find the damped eigenvalue closest in imaginary part
        double rate = -1.0;
        double best = 1e9;
        for (int j = 0; j < rep.eigenvalues.size(); ++j) {
            const double d = std::abs(rep.eigenvalues(j).imag() - undamped.eigenvalues(i).imag());
            if (d < best) {
                best = d;
                rate = -rep.eigenvalues(j).real();
            }
        }
        CHECK(rate == doctest::Approx(predicted).epsilon(0.2));
    }

    // the zero pair is not uniformly damped but stays near the origin
    const double ball = 5.0 * (cfg.gamma * std::pow(cfg.eps, 2 * cfg.n - 1) +
                               cfg.eps * cfg.eps);
    CHECK(std::abs(rep.eigenvalues(rep.zero_pair[0])) <= ball);
    CHECK(std::abs(rep.eigenvalues(rep.zero_pair[1])) <= ball);

    // kappa stable under gamma refinement
    std::vector<double> kappas;
    for (double g : {0.025, 0.05, 0.1}) {
        const LatticeConfig c = make_cfg(3, 0.1, g);
        kappas.push_back(damping_rates(solve_breather(c, 0.0), c).kappa_estimate);
    }
    const double mean = (kappas[0] + kappas[1] + kappas[2]) / 3.0;
    for (double k : kappas) CHECK(std::abs(k - mean) <= 0.1 * mean);

    // eps = 0 with gamma > 0 leaves Gamma = 0, so no mode can be damped
    const LatticeConfig decoupled = make_cfg(3, 0.0, 0.5);
    CHECK_THROWS_AS(damping_rates(solve_breather(decoupled, 0.0), decoupled), NonPositiveDamping);
}

TEST_CASE("semigroup norm on the normal subspace") {
    const LatticeConfig cfg = make_cfg(3, 0.1, 0.1);
    const LinearPack pack = make_pack(cfg, 0.0);
    CHECK(semigroup_norm(pack, 0.0) == doctest::Approx(1.0).epsilon(1e-10));

    // gamma = 0: uniformly bounded in t
    const LinearPack pack0 = make_pack(make_cfg(3, 0.1, 0.0), 0.0);
    double sup = 0.0;
    for (double t = 0.0; t <= 100.0; t += 2.5) sup = std::max(sup, semigroup_norm(pack0, t));
    CHECK(sup <= 1.0 + 5.0 * 0.1);

    // gamma > 0: fitted envelope dominates the measured norm
    const SpectrumReport rep = damping_rates(solve_breather(cfg, 0.0), cfg);
    const double ge = cfg.gamma * cfg.eps;
    const double kappa = rep.kappa_estimate;
    double overshoot = 0.0;
    std::vector<double> norms, times;
    for (int i = 0; i <= 40; ++i) {
        const double t = (10.0 / ge) * i / 40.0;
        const double nv = semigroup_norm(pack, t);
        times.push_back(t);
        norms.push_back(nv);
        overshoot = std::max(overshoot, nv * std::exp(kappa * ge * t) - 1.0);
    }
    const double C = overshoot / cfg.gamma;
    for (size_t i = 0; i < times.size(); ++i)
        CHECK(norms[i] <= (1.0 + C * cfg.gamma) * std::exp(-kappa * ge * times[i]) + 1e-9);
}

TEST_CASE("fitted constants") {
    LatticeConfig cfg;
    const SemigroupConstants k3 = estimate_constants(cfg, 3);
    CHECK(k3.kappa_n > 0.0);
    CHECK(k3.C_n >= 0.0);

    for (int n : {2, 4, 5, 6}) CHECK(estimate_constants(cfg, n).kappa_n > 0.0);

    // per-point kappas stay within 15% of their mean on the fitting grid
    std::vector<double> kappas;
    for (double eps : {0.08, 0.10, 0.12}) {
        for (double g : {0.05, 0.1, 0.2}) {
            const LatticeConfig c = make_cfg(3, eps, g);
            kappas.push_back(damping_rates(solve_breather(c, 0.0), c).kappa_estimate);
        }
    }
    double mean = 0.0;
    for (double k : kappas) mean += k;
    mean /= static_cast<double>(kappas.size());
    for (double k : kappas) CHECK(std::abs(k - mean) <= 0.15 * mean);

    // overshoot above the fitted envelope vanishes with gamma
    const LatticeConfig tiny = make_cfg(3, 0.1, 1e-3);
    const LinearPack pack = make_pack(tiny, 0.0);
    const double ge = tiny.gamma * tiny.eps;
    double over = 0.0;
    for (int i = 0; i <= 24; ++i) {
        const double t = (10.0 / ge) * i / 24.0;
        over = std::max(over, semigroup_norm(pack, t) * std::exp(k3.kappa_n * ge * t) - 1.0);
    }
    CHECK(over <= 0.02);
}

TEST_CASE("unitary similarity preserves the spectrum") {
    const LatticeConfig cfg = make_cfg(4, 0.12);
    const MatrixXd M = build_M(solve_breather(cfg, 0.05), cfg);
    const MatrixXcd X = transform_X(4);
    const SpectrumReport a = spectrum(M);
    const SpectrumReport b = spectrum(MatrixXcd(X.adjoint() * M.cast<Complex>() * X));
    for (int i = 0; i < a.eigenvalues.size(); ++i) {
        // the exactly defective zero pair carries O(sqrt(macheps)) solver
        // noise; the simple modes must agree far more tightly
        const bool zero_mode = (i == a.zero_pair[0] || i == a.zero_pair[1]);
        CHECK(std::abs(a.eigenvalues(i) - b.eigenvalues(i)) <= (zero_mode ? 1e-7 : 1e-11));
    }
}
