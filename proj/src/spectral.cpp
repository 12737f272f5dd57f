#include "dnls/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

namespace dnls {

namespace {

SpectrumReport finish_report(VectorXcd vals, MatrixXcd vecs) {
    const Eigen::Index m = vals.size();
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    auto key = [&](int i) {
        return std::make_tuple(std::llround(vals(i).imag()), vals(i).imag(), vals(i).real());
    };
    std::sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });

    SpectrumReport rep;
    rep.eigenvalues.resize(m);
    rep.eigenvectors.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        rep.eigenvalues(i) = vals(order[i]);
        rep.eigenvectors.col(i) = vecs.col(order[i]).normalized();
    }

    // zero pair: the two smallest-modulus eigenvalues
    std::vector<int> by_mod(m);
    std::iota(by_mod.begin(), by_mod.end(), 0);
    std::sort(by_mod.begin(), by_mod.end(), [&](int a, int b) {
        return std::abs(rep.eigenvalues(a)) < std::abs(rep.eigenvalues(b));
    });
    rep.zero_pair = {std::min(by_mod[0], by_mod[1]), std::max(by_mod[0], by_mod[1])};

    auto is_zero_mode = [&](int i) { return i == rep.zero_pair[0] || i == rep.zero_pair[1]; };
    rep.min_gap_nonzero = std::numeric_limits<double>::infinity();
    rep.max_abs_real_part_undamped = 0.0;
    std::vector<double> rates;
    for (int i = 0; i < m; ++i) {
        if (is_zero_mode(i)) continue;
        rep.max_abs_real_part_undamped =
            std::max(rep.max_abs_real_part_undamped, std::abs(rep.eigenvalues(i).real()));
        rates.push_back(-rep.eigenvalues(i).real());
        for (int j = i + 1; j < m; ++j) {
            if (is_zero_mode(j)) continue;
            rep.min_gap_nonzero =
                std::min(rep.min_gap_nonzero, std::abs(rep.eigenvalues(i) - rep.eigenvalues(j)));
        }
    }
    rep.damping_rates = Eigen::Map<VectorXd>(rates.data(), static_cast<Eigen::Index>(rates.size()));
    return rep;
}

std::string dump_matrix(const MatrixXd& m) {
    std::ostringstream os;
    os << m;
    return os.str();
}

}  // namespace

SpectrumReport spectrum(const MatrixXd& mat) {
    if (!mat.allFinite()) throw NonFiniteState("spectrum: matrix has non-finite entries");
    Eigen::EigenSolver<MatrixXd> es(mat, true);
    if (es.info() != Eigen::Success)
        throw SolverFailure("spectrum: eigensolver failed on\n" + dump_matrix(mat));
    return finish_report(es.eigenvalues(), es.eigenvectors());
}

SpectrumReport spectrum(const MatrixXcd& mat) {
    if (!mat.allFinite()) throw NonFiniteState("spectrum: matrix has non-finite entries");
    Eigen::ComplexEigenSolver<MatrixXcd> es(mat, true);
    if (es.info() != Eigen::Success)
        throw SolverFailure("spectrum: complex eigensolver failed");
    return finish_report(es.eigenvalues(), es.eigenvectors());
}

GapFit gap_analysis(const std::vector<std::pair<double, SpectrumReport>>& sweep) {
    if (sweep.empty()) throw DimensionError("gap_analysis: empty sweep");
    GapFit fit;
    fit.C_lower = std::numeric_limits<double>::infinity();
    std::vector<double> lx, ly;
    double largest_eps = 0.0;
    for (const auto& [eps, rep] : sweep) {
        // split nonzero modes by the sign of Im λ, measure gaps inside each cluster
        std::vector<double> up, down;
        for (int i = 0; i < rep.eigenvalues.size(); ++i) {
            if (i == rep.zero_pair[0] || i == rep.zero_pair[1]) continue;
            (rep.eigenvalues(i).imag() > 0 ? up : down).push_back(rep.eigenvalues(i).imag());
        }
        double cluster_gap = std::numeric_limits<double>::infinity();
        for (auto* cl : {&up, &down}) {
            std::sort(cl->begin(), cl->end());
            for (size_t i = 0; i + 1 < cl->size(); ++i)
                cluster_gap = std::min(cluster_gap, (*cl)[i + 1] - (*cl)[i]);
        }
        if (eps >= largest_eps) {
            largest_eps = eps;
            const double top = up.empty() ? 0.0 : up.front();
            const double bot = down.empty() ? 0.0 : down.back();
            fit.cross_cluster_gap = top - bot;
        }
        if (up.size() >= 2) {
            fit.intra_valid = true;
            fit.C_lower = std::min(fit.C_lower, cluster_gap / std::abs(eps));
            lx.push_back(std::log(std::abs(eps)));
            ly.push_back(std::log(cluster_gap));
        }
    }
    if (fit.intra_valid && lx.size() >= 2) {
        const double n = static_cast<double>(lx.size());
        const double sx = std::accumulate(lx.begin(), lx.end(), 0.0);
        const double sy = std::accumulate(ly.begin(), ly.end(), 0.0);
        double sxx = 0.0, sxy = 0.0;
        for (size_t i = 0; i < lx.size(); ++i) {
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    if (!fit.intra_valid) fit.C_lower = 0.0;
    return fit;
}

SpectrumReport damping_rates(const BreatherProfile& profile, const LatticeConfig& cfg) {
    SpectrumReport rep = spectrum(build_L(profile, cfg));
    if (cfg.gamma > 0.0) {
        for (Eigen::Index i = 0; i < rep.damping_rates.size(); ++i)
            if (rep.damping_rates(i) <= 0.0)
                throw NonPositiveDamping(
                    "damping_rates: mode with nonnegative real part at gamma = " +
                    std::to_string(cfg.gamma) + ", eps = " + std::to_string(cfg.eps));
        rep.kappa_estimate = rep.damping_rates.minCoeff() / (cfg.gamma * cfg.eps);
    }
    return rep;
}

namespace {

// Orthonormal basis of Range(P); P has 2n-2 singular values near 1 and two
// near-zero ones.
MatrixXd range_basis(const MatrixXd& P) {
    Eigen::JacobiSVD<MatrixXd> svd(P, Eigen::ComputeThinU);
    const Eigen::Index r = P.rows() - 2;
    return svd.matrixU().leftCols(r);
}

}  // namespace

// Restriction via the compressed generator U^T L U. Exponentiating the full L
// and sandwiching with the projector is not equivalent: L's perturbed zero
// pair splits into a real +/- pair (the modulational drift direction, growth
// ~ sqrt(gamma eps^{2n-1})), and its leakage dominates the sandwiched norm at
// t ~ 1/(gamma eps) no matter how small gamma is. The constrained normal
// dynamics never sees those directions, so the compression is the faithful
// object.
double semigroup_norm(const LinearPack& pack, double t) {
    const MatrixXd U = range_basis(pack.P);
    const MatrixXd A = U.transpose() * pack.L * U;
    const MatrixXd E = (t * A).exp();
    return E.jacobiSvd().singularValues()(0);
}

SemigroupConstants estimate_constants(const LatticeConfig& cfg, int n) {
    const double eps_grid[] = {0.08, 0.10, 0.12};
    const double gamma_grid[] = {0.05, 0.10, 0.20};

    SemigroupConstants out;
    out.kappa_n = std::numeric_limits<double>::infinity();
    std::vector<LinearPack> packs;
    std::vector<double> gammas;
    for (double e : eps_grid) {
        for (double g : gamma_grid) {
            LatticeConfig c = cfg;
            c.n = n;
            c.eps = e;
            c.gamma = g;
            const BreatherProfile prof = solve_breather(c, 0.0);
            const SpectrumReport rep = damping_rates(prof, c);
            out.kappa_n = std::min(out.kappa_n, rep.kappa_estimate);
            packs.push_back(make_pack(prof, c));
            gammas.push_back(g);
        }
    }
    // overshoot of ||e^{tL}|_RangeP|| over the envelope e^{-kappa γ eps t}
    double C = 0.0;
    for (size_t k = 0; k < packs.size(); ++k) {
        const LinearPack& pk = packs[k];
        const double ge = pk.gamma * pk.eps;
        const MatrixXd U = range_basis(pk.P);
        const MatrixXd A = U.transpose() * pk.L * U;
        const double t_max = 10.0 / ge;
        double over = 0.0;
        const int samples = 48;
        for (int i = 0; i <= samples; ++i) {
            const double t = t_max * i / samples;
            const MatrixXd E = (t * A).exp();
            over = std::max(over, E.jacobiSvd().singularValues()(0) *
                                          std::exp(out.kappa_n * ge * t) -
                                      1.0);
        }
        C = std::max(C, over / gammas[k]);
    }
    out.C_n = C;
    if (out.kappa_n <= 0.0)
        throw NonPositiveDamping("estimate_constants: fitted kappa is not positive");
    return out;
}

}  // namespace dnls
