#include "dnls/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <thread>

#include "dnls/modulation.hpp"

namespace dnls {

namespace {

using nlohmann::json;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string config_comment(const std::string& cmd, const LatticeConfig& cfg, double phi0,
                           const std::string& extra = "") {
    std::ostringstream os;
    os << "# dnls " << cmd << " n=" << cfg.n << " eps=" << fmt(cfg.eps)
       << " gamma=" << fmt(cfg.gamma) << " phi0=" << fmt(phi0)
       << " newton_tol=" << fmt(cfg.newton_tol) << " ode_rtol=" << fmt(cfg.ode_rtol)
       << " ode_atol=" << fmt(cfg.ode_atol);
    if (!extra.empty()) os << " " << extra;
    return os.str();
}

// stdout when path is empty
class Out {
  public:
    explicit Out(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ConfigError("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

void add_lattice_options(CLI::App* sc, LatticeConfig& cfg, double& phi0) {
    sc->add_option("--n", cfg.n, "site count (>= 2)");
    sc->add_option("--eps", cfg.eps, "coupling eps, |eps| < 0.25");
    sc->add_option("--gamma", cfg.gamma, "damping strength at the last site");
    sc->add_option("--phi0", phi0, "frequency offset of the base breather");
    sc->add_option("--newton-tol", cfg.newton_tol, "Newton residual tolerance");
    sc->add_option("--ode-rtol", cfg.ode_rtol, "ODE relative tolerance");
    sc->add_option("--ode-atol", cfg.ode_atol, "ODE absolute tolerance");
}

json profile_to_json(const BreatherProfile& prof, int n) {
    json j;
    j["n"] = n;
    j["eps"] = prof.eps;
    j["phi0"] = prof.phi0;
    j["p"] = std::vector<double>(prof.p.data(), prof.p.data() + prof.p.size());
    j["residual"] = prof.residual;
    j["dp_dphi"] =
        std::vector<double>(prof.dp_dphi.data(), prof.dp_dphi.data() + prof.dp_dphi.size());
    return j;
}

int cmd_breather(const LatticeConfig& cfg, double phi0, const std::string& out_path) {
    cfg.validate();
    const BreatherProfile prof = solve_breather(cfg, phi0);
    Out out(out_path);
    out.stream() << profile_to_json(prof, cfg.n).dump(2) << "\n";
    return 0;
}

void write_spectrum_rows(std::ostream& os, const SpectrumReport& rep, const LatticeConfig& cfg) {
    const double ge = cfg.gamma * cfg.eps;
    for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i) {
        const bool zero_mode = (i == rep.zero_pair[0] || i == rep.zero_pair[1]);
        const double over = (ge != 0.0 && !zero_mode) ? -rep.eigenvalues(i).real() / ge : 0.0;
        os << fmt(rep.eigenvalues(i).real()) << "," << fmt(rep.eigenvalues(i).imag()) << ","
           << fmt(over) << "\n";
    }
}

int cmd_spectrum(const LatticeConfig& cfg, double phi0, const std::string& sweep_spec,
                 const std::string& out_path, const std::string& summary_path) {
    cfg.validate();
    Out out(out_path);
    std::ostream& os = out.stream();
    os << config_comment("spectrum", cfg, phi0,
                         sweep_spec.empty() ? "" : "sweep_eps=" + sweep_spec)
       << "\n";
    os << "eigenvalue_re,eigenvalue_im,damping_over_gamma_eps\n";

    std::vector<double> eps_values;
    if (sweep_spec.empty()) {
        eps_values.push_back(cfg.eps);
    } else {
        double a, b;
        int k;
        if (std::sscanf(sweep_spec.c_str(), "%lf:%lf:%d", &a, &b, &k) != 3 || k < 2)
            throw ConfigError("--sweep-eps expects start:end:count with count >= 2");
        for (int i = 0; i < k; ++i) eps_values.push_back(a + (b - a) * i / (k - 1));
    }

    for (double e : eps_values) {
        LatticeConfig c = cfg;
        c.eps = e;
        c.validate();
        const BreatherProfile prof = solve_breather(c, phi0);
        const SpectrumReport rep =
            c.gamma > 0 ? damping_rates(prof, c) : spectrum(build_L(prof, c));
        if (eps_values.size() > 1) os << "# eps = " << fmt(e) << "\n";
        write_spectrum_rows(os, rep, c);
    }

    if (!summary_path.empty()) {
        const BreatherProfile prof = solve_breather(cfg, phi0);
        const SpectrumReport rep =
            cfg.gamma > 0 ? damping_rates(prof, cfg) : spectrum(build_L(prof, cfg));
        json j;
        j["min_gap_over_eps"] = rep.min_gap_nonzero / std::abs(cfg.eps);
        j["kappa_estimate"] = rep.kappa_estimate;
        double C_est = 0.0;
        if (cfg.gamma > 0) {
            const LinearPack pack = make_pack(prof, cfg);
            const double ge = cfg.gamma * cfg.eps;
            for (int i = 0; i <= 32; ++i) {
                const double t = (10.0 / ge) * i / 32;
                C_est = std::max(C_est, (semigroup_norm(pack, t) *
                                             std::exp(rep.kappa_estimate * ge * t) -
                                         1.0) /
                                            cfg.gamma);
            }
        }
        j["C_estimate"] = C_est;
        std::ofstream sf(summary_path);
        if (!sf) throw ConfigError("cannot open summary file: " + summary_path);
        sf << j.dump(2) << "\n";
    }
    return 0;
}

int cmd_evolve(const LatticeConfig& cfg, double phi0, double t1, double dt, double kick,
               bool decompose, const std::string& out_path) {
    cfg.validate();
    if (!(t1 > 0)) throw ConfigError("--t1 must be positive");
    const BreatherProfile prof = solve_breather(cfg, phi0);
    const LinearPack pack = make_pack(prof, cfg);

    VectorXcd w0 = prof.p.cast<Complex>();
    if (kick != 0.0) {
        // deterministic direction in Range(P)
        VectorXd dir = VectorXd::Zero(2 * cfg.n);
        for (int i = 0; i < 2 * cfg.n; ++i) dir(i) = std::sin(1.0 + 2.7 * i);
        dir = pack.P * dir;
        dir.normalize();
        w0 += kick * to_complex(dir);
    }

    // integration runs in the phi0-rotating frame; at t = 0 the frames agree
    const TrajectoryRecord traj = integrate(make_rhs(cfg, phi0), w0, 0.0, t1, cfg, dt);

    Out out(out_path);
    std::ostream& os = out.stream();
    os << config_comment("evolve", cfg, phi0,
                         "t1=" + fmt(t1) + " dt=" + fmt(dt) + " kick=" + fmt(kick))
       << "\n";
    os << "t";
    for (int j = 1; j <= cfg.n; ++j) os << ",re_w" << j << ",im_w" << j;
    os << ",H,norm_sq";
    if (decompose) os << ",phi,theta,zeta_norm,delta,s";
    os << "\n";

    double phi = phi0, theta = 0.0;
    double s = 0.0, phi_integral = 0.0, prev_t = 0.0, prev_phi = phi0;
    for (size_t k = 0; k < traj.times.size(); ++k) {
        const double t = traj.times[k];
        const VectorXcd w = gauge_rotate(traj.states[k], phi0 * t);  // lab frame
        os << fmt(t);
        for (int j = 0; j < cfg.n; ++j) os << "," << fmt(w(j).real()) << "," << fmt(w(j).imag());
        os << "," << fmt(traj.hamiltonians[k]) << "," << fmt(traj.norms_sq[k]);
        if (decompose) {
            const ModulationFrame fr = decompose_fixed_frame(w, t, pack, phi, theta, cfg);
            phi = fr.phi;
            theta = fr.theta;
            phi_integral += 0.5 * (t - prev_t) * (phi + prev_phi);
            s = (t * phi + theta) - (0.0 * phi0 + 0.0) - phi_integral;
            prev_t = t;
            prev_phi = phi;
            os << "," << fmt(phi) << "," << fmt(theta) << "," << fmt(fr.zeta.norm()) << ","
               << fmt(phi - phi0) << "," << fmt(s);
        }
        os << "\n";
    }
    return 0;
}

int cmd_epochs(const LatticeConfig& cfg, double phi0, int K, double zeta0_frac, double ct,
               const std::string& out_epochs, const std::string& out_spiral) {
    cfg.validate();
    if (K < 1) throw ConfigError("--k must be >= 1");
    if (ct < 0) throw ConfigError("--ct must be >= 0");
    // --ct overrides the fitted arrival-time constant: T = ct / eps. With the
    // fitted constants T can exceed the drift-window budget for any K.
    const SemigroupConstants constants =
        ct > 0 ? SemigroupConstants{1.0, ct / 8.0} : estimate_constants(cfg, cfg.n);

    ModulationFrame fr;
    fr.t = 0.0;
    fr.phi = phi0;
    fr.theta = 0.0;
    fr.base_phi = phi0;
    fr.zeta = VectorXd::Zero(2 * cfg.n);
    if (zeta0_frac != 0.0) {
        const LinearPack pack = make_pack(cfg, phi0);
        VectorXd dir = VectorXd::Zero(2 * cfg.n);
        for (int i = 0; i < 2 * cfg.n; ++i) dir(i) = std::cos(0.5 + 1.9 * i);
        dir = pack.P * dir;
        dir.normalize();
        fr.zeta = zeta0_frac * cfg.gamma * std::pow(std::abs(cfg.eps), cfg.n) * dir;
    }

    const EpochChain chain = iterate_epochs(fr, K, cfg, constants, !out_spiral.empty());

    Out out(out_epochs);
    std::ostream& os = out.stream();
    os << config_comment("epochs", cfg, phi0,
                         "k=" + std::to_string(K) + " zeta0_frac=" + fmt(zeta0_frac) +
                             " kappa=" + fmt(constants.kappa_n) + " C=" + fmt(constants.C_n))
       << "\n";
    os << "k,T,phi_k,phi_shift,zeta_norm_max,zeta_norm_end,zeta_norm_reproj,pass_a,pass_b,pass_c\n";
    for (size_t k = 0; k < chain.reports.size(); ++k) {
        const EpochReport& r = chain.reports[k];
        os << (k + 1) << "," << fmt(r.T) << "," << fmt(chain.phi_k[k + 1]) << ","
           << fmt(r.phi_shift_measured) << "," << fmt(r.zeta_norm_max) << ","
           << fmt(r.zeta_norm_end) << "," << fmt(r.zeta_norm_after_reproj) << ","
           << (r.pass_interior ? 1 : 0) << "," << (r.pass_reproj ? 1 : 0) << ","
           << (r.pass_drift ? 1 : 0) << "\n";
    }

    if (!out_spiral.empty()) {
        Out sp(out_spiral);
        sp.stream() << config_comment("epochs-spiral", cfg, phi0, "k=" + std::to_string(K))
                    << "\n";
        sp.stream() << "t,winding_phase,phi\n";
        for (const EpochSample& smp : chain.samples)
            sp.stream() << fmt(smp.t) << "," << fmt(smp.winding_phase) << "," << fmt(smp.phi)
                        << "\n";
    }

    bool all_ok = !chain.reports.empty();
    for (const EpochReport& r : chain.reports) all_ok = all_ok && r.all_pass();
    return all_ok ? 0 : 1;
}

std::vector<double> parse_list(const std::string& spec) {
    std::vector<double> vals;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) vals.push_back(std::stod(item));
    }
    if (vals.empty()) throw ConfigError("empty value list: " + spec);
    return vals;
}

int cmd_sweep(const LatticeConfig& base, double phi0, const std::string& task,
              const std::string& eps_list, const std::string& gamma_list,
              const std::string& out_dir, int threads) {
    if (task != "breather" && task != "spectrum")
        throw ConfigError("--task must be breather or spectrum");
    const std::vector<double> eps_values = parse_list(eps_list);
    const std::vector<double> gamma_values =
        gamma_list.empty() ? std::vector<double>{base.gamma} : parse_list(gamma_list);
    std::filesystem::create_directories(out_dir);

    struct Point {
        double eps, gamma;
    };
    std::vector<Point> points;
    for (double e : eps_values)
        for (double g : gamma_values) points.push_back({e, g});

    std::vector<int> codes(points.size(), 0);
    auto work = [&](size_t begin, size_t stride) {
        for (size_t i = begin; i < points.size(); i += stride) {
            LatticeConfig cfg = base;
            cfg.eps = points[i].eps;
            cfg.gamma = points[i].gamma;
            std::ostringstream name;
            name << out_dir << "/" << task << "_eps" << fmt(points[i].eps) << "_gamma"
                 << fmt(points[i].gamma);
            try {
                if (task == "breather")
                    codes[i] = cmd_breather(cfg, phi0, name.str() + ".json");
                else
                    codes[i] = cmd_spectrum(cfg, phi0, "", name.str() + ".csv", "");
            } catch (const std::exception&) {
                codes[i] = 1;
            }
        }
    };
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(points.size())));
    std::vector<std::thread> pool;
    for (int w = 1; w < nt; ++w) pool.emplace_back(work, static_cast<size_t>(w), nt);
    work(0, nt);
    for (auto& th : pool) th.join();
    for (int c : codes)
        if (c != 0) return 1;
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"dnls - damped discrete NLS breather laboratory"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI config file; command-line flags win");
    app.allow_config_extras(CLI::config_extras_mode::error);

    LatticeConfig cfg;
    double phi0 = 0.0;

    auto* sc_breather = app.add_subcommand("breather", "solve one breather profile");
    std::string breather_out;
    add_lattice_options(sc_breather, cfg, phi0);
    sc_breather->add_option("--out", breather_out, "output JSON path (default stdout)");

    auto* sc_spectrum = app.add_subcommand("spectrum", "eigenvalues of the linearization");
    std::string sweep_eps, spectrum_out, summary_out;
    add_lattice_options(sc_spectrum, cfg, phi0);
    sc_spectrum->add_option("--sweep-eps", sweep_eps, "eps sweep start:end:count");
    sc_spectrum->add_option("--out", spectrum_out, "output CSV path (default stdout)");
    sc_spectrum->add_option("--summary", summary_out, "JSON summary path");

    auto* sc_evolve = app.add_subcommand("evolve", "integrate the full dynamics");
    double t1 = 100.0, dt = 0.5, kick = 0.0;
    bool decompose = false;
    std::string evolve_out;
    add_lattice_options(sc_evolve, cfg, phi0);
    sc_evolve->add_option("--t1", t1, "final time");
    sc_evolve->add_option("--dt", dt, "sample cadence");
    sc_evolve->add_option("--kick", kick, "normal-direction perturbation amplitude");
    sc_evolve->add_flag("--decompose", decompose, "append modulation columns");
    sc_evolve->add_option("--out", evolve_out, "output CSV path (default stdout)");

    auto* sc_epochs = app.add_subcommand("epochs", "run the epoch iteration");
    int K = 1;
    double zeta0_frac = 0.0, ct = 0.0;
    std::string epochs_out, spiral_out;
    add_lattice_options(sc_epochs, cfg, phi0);
    sc_epochs->add_option("--k", K, "number of epochs (>= 1)");
    sc_epochs->add_option("--zeta0-frac", zeta0_frac,
                          "initial ||zeta|| as a fraction of gamma eps^n");
    sc_epochs->add_option("--ct", ct, "arrival-time constant override, T = ct/eps (0 = fitted)");
    sc_epochs->add_option("--out", epochs_out, "per-epoch CSV path (default stdout)");
    sc_epochs->add_option("--spiral", spiral_out, "winding-phase CSV path");

    auto* sc_sweep = app.add_subcommand("sweep", "fan a task over parameter lists");
    std::string task = "breather", eps_list, gamma_list, out_dir = "sweep_out";
    int threads = 4;
    add_lattice_options(sc_sweep, cfg, phi0);
    sc_sweep->add_option("--task", task, "breather | spectrum");
    sc_sweep->add_option("--eps-list", eps_list, "comma-separated eps values")->required();
    sc_sweep->add_option("--gamma-list", gamma_list, "comma-separated gamma values");
    sc_sweep->add_option("--out-dir", out_dir, "output directory");
    sc_sweep->add_option("--threads", threads, "worker threads");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help() << std::flush;
            return 0;
        }
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (sc_breather->parsed()) return cmd_breather(cfg, phi0, breather_out);
        if (sc_spectrum->parsed())
            return cmd_spectrum(cfg, phi0, sweep_eps, spectrum_out, summary_out);
        if (sc_evolve->parsed()) return cmd_evolve(cfg, phi0, t1, dt, kick, decompose, evolve_out);
        if (sc_epochs->parsed())
            return cmd_epochs(cfg, phi0, K, zeta0_frac, ct, epochs_out, spiral_out);
        if (sc_sweep->parsed())
            return cmd_sweep(cfg, phi0, task, eps_list, gamma_list, out_dir, threads);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace dnls
