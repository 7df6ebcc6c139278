#include "nyv/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "nyv/io.hpp"
#include "nyv/sewing.hpp"

namespace nyv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kXiSeedOffset = 1000003;
constexpr std::uint64_t kFieldSeedOffset = 2000003;

std::function<double(double)> value_profile(const std::string& kind, double scale, double x_max) {
    if (kind == "zero" || kind == "none") return [](double) { return 0.0; };
    if (kind == "one") return [scale](double) { return scale; };
    if (kind == "sin")
        return [scale, x_max](double v) { return scale * std::sin(kPi * v / x_max); };
    if (kind == "weierstrass")
        return [scale, x_max](double v) {
            double s = 0.0;
            for (int m = 1; m <= 10; ++m)
                s += std::pow(2.0, -0.5 * m) * std::cos(2.0 * kPi * std::pow(2.0, m) * v /
                                                        (2.0 * x_max));
            return scale * s;
        };
    if (kind == "smooth_step")
        return [scale, x_max](double v) { return scale * std::tanh(std::sin(kPi * v / x_max) / 0.3); };
    throw config_error("unknown value profile '" + kind + "'");
}

TorusField sample_profile(const std::function<double(double)>& f, const SpectralGrid& g) {
    std::vector<double> v(g.n);
    for (std::size_t i = 0; i < g.n; ++i) v[i] = f(g.x(i));
    return TorusField(g, std::move(v));
}

}  // namespace

TorusField make_g(const ExperimentConfig& cfg) {
    const ValueGrid vg(cfg.value_xmax, cfg.value_m);
    return sample_profile(make_g_callable(cfg), vg.spectral());
}

std::function<double(double)> make_g_callable(const ExperimentConfig& cfg) {
    return value_profile(cfg.g_kind, cfg.g_scale, cfg.value_xmax);
}

TorusField make_b(const ExperimentConfig& cfg) {
    const ValueGrid vg(cfg.value_xmax, cfg.value_m);
    return sample_profile(make_b_callable(cfg), vg.spectral());
}

std::function<double(double)> make_b_callable(const ExperimentConfig& cfg) {
    return value_profile(cfg.b_kind, cfg.b_scale, cfg.value_xmax);
}

TorusField make_xi(const ExperimentConfig& cfg) {
    const SpectralGrid grid(cfg.grid_n, cfg.grid_period);
    if (cfg.xi_kind == "one") return TorusField::constant(grid, cfg.xi_scale);
    if (cfg.xi_kind == "white") {
        TorusField f = sample_white_noise(grid, cfg.seed + kXiSeedOffset).field;
        f *= cfg.xi_scale;
        return f;
    }
    // smooth: random band-limited field, modes |k| <= 8, sup norm = xi_scale
    const CounterRng rng(cfg.seed + kXiSeedOffset, CounterRng::kFieldStream);
    std::vector<std::complex<double>> spec(grid.n, std::complex<double>(0.0, 0.0));
    for (std::size_t k = 1; k <= 8; ++k) {
        double g1, g2;
        rng.gaussians(k, g1, g2);
        spec[k] = std::complex<double>(g1, g2) * 0.5;
        spec[grid.n - k] = std::conj(spec[k]);
    }
    TorusField f = TorusField::from_spectrum(grid, std::move(spec));
    const double s = sup_norm(f);
    if (s > 0.0) f *= cfg.xi_scale / s;
    return f;
}

TorusField make_psi(const ExperimentConfig& cfg) {
    const SpectralGrid grid(cfg.grid_n, cfg.grid_period);
    std::vector<double> v(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) v[i] = std::cos(2.0 * kPi * grid.x(i) / grid.period);
    return TorusField(grid, std::move(v));
}

std::vector<double> solver_fine_grid(const ExperimentConfig& cfg) {
    const std::size_t cells = cfg.out_times * cfg.fine_per_out;
    std::vector<double> t(cells + 1);
    const double dt = cfg.horizon_t / static_cast<double>(cells);
    for (std::size_t i = 0; i <= cells; ++i) t[i] = static_cast<double>(i) * dt;
    t.back() = cfg.horizon_t;
    return t;
}

SampledPath make_omega(const ExperimentConfig& cfg) {
    const std::size_t fine_cells = cfg.out_times * cfg.fine_per_out;
    const std::size_t n_path = cfg.path_refine * fine_cells + 1;
    if (cfg.omega_kind == "zero") return SampledPath::zero(cfg.horizon_t, n_path);
    return sample_lfsm(cfg.alpha, cfg.hurst, cfg.horizon_t, n_path, 50.0 * cfg.horizon_t, cfg.seed)
        .path();
}

Weight make_weight(const ExperimentConfig& cfg) {
    if (cfg.weight_kind == "polynomial") return Weight::polynomial(cfg.weight_lambda);
    return Weight::unit();
}

MSHEProblem build_problem(const ExperimentConfig& cfg) {
    MSHEProblem prob;
    prob.alpha = cfg.alpha;
    prob.xi = make_xi(cfg);
    prob.psi = make_psi(cfg);
    prob.g = make_g(cfg);
    prob.g_callable = make_g_callable(cfg);
    prob.omega = make_omega(cfg);
    prob.exponents = {cfg.beta, cfg.vartheta, cfg.gamma, cfg.kappa, cfg.sigma};
    prob.horizon = cfg.horizon_t;

    const ValueGrid vg(cfg.value_xmax, cfg.value_m);
    const std::vector<double> fine = solver_fine_grid(cfg);
    prob.averaged = compute_averaged_field(prob.g, prob.omega, vg, fine);
    prob.averaged.declare_exponents(cfg.gamma, cfg.kappa);
    prob.averaged.set_weight(make_weight(cfg));

    if (cfg.b_kind != "none") {
        prob.b = make_b(cfg);
        prob.b_callable = make_b_callable(cfg);
        prob.averaged_drift = compute_averaged_field(*prob.b, prob.omega, vg, fine);
        prob.averaged_drift->declare_exponents(cfg.gamma, cfg.kappa);
        prob.averaged_drift->set_weight(make_weight(cfg));
    }
    return prob;
}

SolverConfig solver_config(const ExperimentConfig& cfg) {
    SolverConfig sc;
    sc.picard_tol = cfg.picard_tol;
    sc.picard_kmax = static_cast<int>(cfg.picard_kmax);
    sc.safety = cfg.safety;
    sc.tau_min_exp = static_cast<int>(cfg.tau_min_exp);
    sc.n_out = cfg.out_times;
    sc.sewing_tol = cfg.sewing_tol;
    sc.sewing_n_max = static_cast<int>(cfg.sewing_nmax);
    return sc;
}

namespace {

struct RunDir {
    std::filesystem::path dir;
    std::vector<std::string> artifacts;

    explicit RunDir(const std::filesystem::path& d) : dir(d) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw io_error("cannot create output directory " + dir.string());
    }

    std::filesystem::path file(const std::string& name) {
        artifacts.push_back(name);
        return dir / name;
    }

    void finish(const ExperimentConfig& cfg) {
        {
            std::ofstream os(dir / "manifest.nyv", std::ios::binary);
            if (!os) throw io_error("cannot write manifest");
            os << "# nyv " << "0.1.0" << " run manifest; reproducible via: nyv " << cfg.command
               << " --config manifest.nyv\n";
            os << "# config_hash = " << std::to_string(cfg.config_hash()) << "\n";
            os << cfg.canonical_text();
        }
        CsvWriter csv({"filename", "config_hash"});
        std::sort(artifacts.begin(), artifacts.end());
        for (const auto& a : artifacts)
            csv.add_row(std::vector<std::string>{a, std::to_string(cfg.config_hash())});
        csv.write(dir / "artifacts.csv");
    }
};

int run_simulate(const ExperimentConfig& cfg, RunDir& rd) {
    const MSHEProblem prob = build_problem(cfg);
    const SolverConfig sc = solver_config(cfg);
    const Solution sol =
        prob.averaged_drift ? solve_drifted(prob, sc) : solve_mshe(prob, sc);

    CsvWriter index({"t", "filename", "window_id"});
    auto window_of = [&](double t) {
        std::size_t w = 0;
        for (std::size_t i = 0; i < sol.windows.size(); ++i)
            if (sol.windows[i].start <= t + 1e-15) w = i;
        return w;
    };
    for (std::size_t i = 0; i < sol.out_times.size(); ++i) {
        char uname[32], tname[32];
        std::snprintf(uname, sizeof(uname), "u_%04zu.nyvf", i);
        std::snprintf(tname, sizeof(tname), "theta_%04zu.nyvf", i);
        dump_field(rd.file(uname), sol.u_out[i]);
        dump_field(rd.file(tname), sol.theta_out[i]);
        index.add_row(std::vector<std::string>{format_double(sol.out_times[i]), uname,
                                               std::to_string(window_of(sol.out_times[i]))});
        index.add_row(std::vector<std::string>{format_double(sol.out_times[i]), tname,
                                               std::to_string(window_of(sol.out_times[i]))});
    }
    index.write(rd.file("solution_index.csv"));

    CsvWriter diag({"window_id", "tau", "picard_iters", "contraction_max", "sewing_levels"});
    for (std::size_t i = 0; i < sol.windows.size(); ++i) {
        const auto& w = sol.windows[i];
        diag.add_row(std::vector<std::string>{
            std::to_string(i), format_double(w.tau), std::to_string(w.picard_iters),
            format_double(w.contraction_max), std::to_string(w.sewing_levels)});
    }
    diag.write(rd.file("diagnostics.csv"));

    CsvWriter omega_csv({"t", "value"});
    for (std::size_t i = 0; i < prob.omega.t.size(); ++i)
        omega_csv.add_row(std::vector<double>{prob.omega.t[i], prob.omega.values[i]});
    omega_csv.write(rd.file("omega.csv"));

    std::ofstream sum(rd.file("summary.txt"), std::ios::binary);
    sum << "status = " << (sol.status == SolveStatus::completed ? "completed" : "horizon_reached")
        << "\n";
    sum << "reached_time = " << format_double(sol.reached_time) << "\n";
    sum << "windows = " << sol.windows.size() << "\n";
    sum << "seminorm = " << format_double(sol.seminorm) << "\n";
    for (const auto& [s, v] : sol.sigma_spot_checks)
        sum << "seminorm_at_sigma_" << format_double(s) << " = " << format_double(v) << "\n";
    for (const auto& line : sol.log) sum << "log = " << line << "\n";
    return 0;
}

int run_regularity(const ExperimentConfig& cfg, RunDir& rd) {
    const ValueGrid vg(cfg.value_xmax, cfg.value_m);
    const TorusField g = make_g(cfg);
    const std::vector<double> fine = solver_fine_grid(cfg);
    const std::size_t n_path = cfg.path_refine * (fine.size() - 1) + 1;

    const int jmax = vg.spectral().j_max();
    const int j_lo = 2, j_hi = jmax - 2;

    double gamma_sum = 0.0, gain_sum = 0.0;
    std::size_t gain_count = 0;
    std::vector<double> scale_acc, norm_acc;
    for (std::uint64_t i = 0; i < cfg.samples; ++i) {
        SampledPath omega;
        if (cfg.omega_kind == "zero")
            omega = SampledPath::zero(cfg.horizon_t, n_path);
        else
            omega = sample_lfsm(cfg.alpha, cfg.hurst, cfg.horizon_t, n_path,
                                50.0 * cfg.horizon_t, mix_seed(cfg.seed, i))
                        .path();
        AveragedField A = compute_averaged_field(g, omega, vg, fine);
        A.set_weight(make_weight(cfg));
        const TimeRegularityEstimate tr = estimate_time_regularity(A, cfg.reg_kappa_eval);
        gamma_sum += tr.gamma_hat;
        if (scale_acc.empty()) {
            scale_acc = tr.scales;
            norm_acc.assign(tr.norms.size(), 0.0);
        }
        for (std::size_t k = 0; k < tr.norms.size(); ++k) norm_acc[k] += tr.norms[k];
        try {
            const SpaceGainEstimate sg = estimate_space_gain(A, g, j_lo, j_hi);
            gain_sum += sg.gain;
            ++gain_count;
        } catch (const numeric_error&) {
            // saturated or degenerate sample; skipped from the average
        }
    }
    const double gamma_hat = gamma_sum / static_cast<double>(cfg.samples);
    const double gain_hat = gain_count ? gain_sum / static_cast<double>(gain_count) : 0.0;

    CsvWriter csv({"scale", "norm"});
    for (std::size_t k = 0; k < scale_acc.size(); ++k)
        csv.add_row(std::vector<double>{scale_acc[k],
                                        norm_acc[k] / static_cast<double>(cfg.samples)});
    csv.write(rd.file("regularity_scales.csv"));

    std::ofstream sum(rd.file("summary.txt"), std::ios::binary);
    sum << "gamma_hat = " << format_double(gamma_hat) << "\n";
    sum << "gain_hat = " << format_double(gain_hat) << "\n";
    sum << "n_paths = " << cfg.samples << "\n";
    sum << "seed_base = " << cfg.seed << "\n";
    return 0;
}

int run_tails(const ExperimentConfig& cfg, RunDir& rd) {
    const TorusField g = make_g(cfg);
    TailCheckParams prm;
    prm.j = static_cast<int>(cfg.tail_j);
    prm.s = cfg.tail_s;
    prm.t = cfg.tail_t;
    prm.alpha = cfg.alpha;
    prm.hurst = cfg.hurst;
    prm.nu = cfg.nu;
    prm.n_samples = cfg.tail_nsamples;
    prm.seed = cfg.seed;
    prm.n_path = cfg.tail_npath;
    prm.w = make_weight(cfg);
    const TailReport rep = tail_check_blocks(g, prm);

    CsvWriter csv({"q", "ratio"});
    for (const auto& [q, r] : rep.quantiles) csv.add_row(std::vector<double>{q, r});
    csv.write(rd.file("tail_quantiles.csv"));

    // self-similarity quantiles of the LFSM ensemble: scale c, |L_{c t0}|
    CsvWriter ens({"scale", "quantile", "value"});
    {
        const double t0 = cfg.horizon_t / 8.0;
        const std::size_t n_path = 257;
        std::vector<std::vector<double>> abs_at_scale(4);
        for (std::uint64_t i = 0; i < std::min<std::uint64_t>(cfg.tail_nsamples, 2000); ++i) {
            const LFSMPath L = sample_lfsm(cfg.alpha, cfg.hurst, cfg.horizon_t, n_path,
                                           50.0 * cfg.horizon_t, mix_seed(cfg.seed + 7, i));
            for (int c = 0; c < 4; ++c) {
                const double tc = t0 * std::pow(2.0, c);
                abs_at_scale[c].push_back(std::abs(L.values()[L.path().index_of(tc)]));
            }
        }
        for (int c = 0; c < 4; ++c) {
            std::sort(abs_at_scale[c].begin(), abs_at_scale[c].end());
            for (double q : {0.5, 0.75, 0.9}) {
                const double pos = q * static_cast<double>(abs_at_scale[c].size() - 1);
                const std::size_t i0 = static_cast<std::size_t>(pos);
                ens.add_row(std::vector<double>{std::pow(2.0, c), q, abs_at_scale[c][i0]});
            }
        }
    }
    ens.write(rd.file("ensemble_stats.csv"));

    std::ofstream sum(rd.file("summary.txt"), std::ios::binary);
    sum << "slope = " << format_double(rep.slope) << "\n";
    sum << "intercept = " << format_double(rep.intercept) << "\n";
    sum << "r2 = " << format_double(rep.r2) << "\n";
    sum << "median_ratio = " << format_double(rep.median_ratio) << "\n";
    sum << "median_unnormalized = " << format_double(rep.median_unnormalized) << "\n";
    return 0;
}

int run_convergence(const ExperimentConfig& cfg, RunDir& rd) {
    const MSHEProblem prob = build_problem(cfg);
    const FracHeatOp heat(cfg.alpha, prob.xi.grid());
    const HeatXiOperator S(SingularVolterraOp(heat, prob.xi, cfg.beta, cfg.vartheta));
    const AveragedFieldDriver X(prob.averaged, cfg.gamma, cfg.kappa);

    // y: heat flow of the initial datum on the fine grid
    SingularHolderPath y;
    y.t = prob.averaged.t_grid();
    y.sigma = cfg.sigma;
    for (double t : y.t) y.fields.push_back(heat_apply(heat, t, prob.psi));

    const SewingResult res = sewing_integral(S, X, y, cfg.horizon_t,
                                             static_cast<int>(cfg.sewing_nmax), cfg.sewing_tol);
    CsvWriter csv({"level", "increment_norm", "cumulative_estimate_norm"});
    for (std::size_t i = 0; i < res.report.levels.size(); ++i) {
        csv.add_row(std::vector<std::string>{
            std::to_string(res.report.levels[i]),
            i == 0 ? "" : format_double(res.report.increment_norms[i - 1]),
            format_double(res.report.estimate_norms[i])});
    }
    csv.write(rd.file("convergence.csv"));

    std::ofstream sum(rd.file("summary.txt"), std::ios::binary);
    sum << "converged = " << (res.report.converged ? 1 : 0) << "\n";
    sum << "n_star = " << res.report.n_star << "\n";
    sum << "fitted_decay = "
        << format_double(res.report.fitted_decay(1, static_cast<int>(cfg.sewing_nmax))) << "\n";
    sum << "exponent_warning = " << (res.report.exponent_warning ? 1 : 0) << "\n";
    return res.report.converged ? 0 : 3;
}

int run_stability(const ExperimentConfig& cfg, RunDir& rd) {
    const MSHEProblem prob = build_problem(cfg);
    const double dx = 2.0 * cfg.value_xmax / static_cast<double>(cfg.value_m);
    std::vector<double> widths;
    for (double w : parse_double_list(cfg.mollifier_widths_dx)) widths.push_back(w * dx);
    const std::vector<StabilityRow> rows = stability_experiment(prob, widths, solver_config(cfg));

    CsvWriter csv({"width", "averaged_err", "solution_err", "ratio"});
    for (const auto& r : rows)
        csv.add_row(std::vector<double>{r.width, r.averaged_err, r.solution_err, r.ratio});
    csv.write(rd.file("stability.csv"));

    double rmin = kInf, rmax = 0.0;
    for (const auto& r : rows)
        if (r.ratio > 0.0) {
            rmin = std::min(rmin, r.ratio);
            rmax = std::max(rmax, r.ratio);
        }
    std::ofstream sum(rd.file("summary.txt"), std::ios::binary);
    sum << "n_widths = " << rows.size() << "\n";
    sum << "ratio_min = " << format_double(rmin) << "\n";
    sum << "ratio_max = " << format_double(rmax) << "\n";
    return 0;
}

int run_verify_ops(const ExperimentConfig& cfg, RunDir& rd) {
    const SpectralGrid grid(cfg.grid_n, cfg.grid_period);
    const FracHeatOp heat(cfg.alpha, grid);
    const TorusField xi = make_xi(cfg);
    const SingularVolterraOp op(heat, xi, cfg.beta, cfg.vartheta);

    // sample fields with C^beta-type spectral decay
    std::vector<TorusField> samples;
    const CounterRng rng(cfg.seed + kFieldSeedOffset, CounterRng::kFieldStream);
    const std::size_t n_samp = std::max<std::uint64_t>(3, std::min<std::uint64_t>(cfg.samples, 6));
    for (std::size_t s = 0; s < n_samp; ++s) {
        std::vector<std::complex<double>> spec(grid.n, std::complex<double>(0.0, 0.0));
        for (std::size_t k = 1; k < grid.n / 2; ++k) {
            double g1, g2;
            rng.gaussians(s * grid.n + k, g1, g2);
            const double decay = std::pow(static_cast<double>(k), -(cfg.beta + 0.5));
            spec[k] = std::complex<double>(g1, g2) * decay * 0.5;
            spec[grid.n - k] = std::conj(spec[k]);
        }
        samples.push_back(TorusField::from_spectrum(grid, std::move(spec)));
    }

    std::vector<double> t_grid;
    for (int i = 1; i <= 8; ++i) t_grid.push_back(0.008 * i);
    const std::vector<double> theta_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    const HypothesisReport rep = verify_kernel_hypothesis(op, cfg.beta, samples, t_grid, theta_grid);

    CsvWriter csv({"estimate_id", "theta", "theta_prime", "max_ratio", "median_ratio",
                   "n_samples"});
    for (const auto& st : rep.stats)
        csv.add_row(std::vector<std::string>{
            std::to_string(st.estimate_id), format_double(st.theta),
            format_double(st.theta_prime), format_double(st.max_ratio),
            format_double(st.median_ratio), std::to_string(st.n_samples)});
    csv.write(rd.file("hypothesis.csv"));

    bool ok = true;
    std::ofstream sum(rd.file("summary.txt"), std::ios::binary);
    for (int fam = 0; fam < 3; ++fam) {
        std::vector<double> pooled = rep.pooled[fam];
        std::sort(pooled.begin(), pooled.end());
        const double mx = pooled.empty() ? 0.0 : pooled.back();
        const double med = pooled.empty() ? 0.0 : pooled[pooled.size() / 2];
        const bool fin = std::isfinite(mx);
        const bool stable = med == 0.0 ? mx == 0.0 : mx < 10.0 * med;
        ok = ok && fin && stable;
        sum << "family_" << (fam + 1) << "_max = " << format_double(mx) << "\n";
        sum << "family_" << (fam + 1) << "_median = " << format_double(med) << "\n";
        sum << "family_" << (fam + 1) << "_ok = " << ((fin && stable) ? 1 : 0) << "\n";
    }

    // partition-of-unity defect over the retained band
    double defect = 0.0;
    for (std::size_t k = 0; k <= grid.n / 2; ++k)
        defect = std::max(defect,
                          partition_defect(static_cast<double>(k), grid.j_max()));
    sum << "partition_defect = " << format_double(defect) << "\n";
    ok = ok && defect <= 1e-12;
    return ok ? 0 : 3;
}

}  // namespace

int run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.validate();
    RunDir rd(out_dir);
    int code = 0;
    if (cfg.command == "simulate")
        code = run_simulate(cfg, rd);
    else if (cfg.command == "regularity")
        code = run_regularity(cfg, rd);
    else if (cfg.command == "tails")
        code = run_tails(cfg, rd);
    else if (cfg.command == "convergence")
        code = run_convergence(cfg, rd);
    else if (cfg.command == "stability")
        code = run_stability(cfg, rd);
    else if (cfg.command == "verify-ops")
        code = run_verify_ops(cfg, rd);
    else
        throw config_error("unknown command '" + cfg.command + "'");
    rd.finish(cfg);
    return code;
}

FeasibilityVerdict feasibility_report(double vartheta, double hurst, double kappa_in) {
    if (!(vartheta > 0.0 && vartheta < 1.0)) throw config_error("vartheta must lie in (0, 1)");
    if (!(hurst > 0.0 && hurst < 1.0)) throw config_error("hurst must lie in (0, 1)");
    FeasibilityVerdict v;
    v.threshold = 3.0 - (1.0 - vartheta) / (2.0 * hurst);
    v.admissible = kappa_in > v.threshold;
    if (v.threshold <= 0.0)
        v.regime = "distributional g admissible";
    else if (v.threshold <= 1.0)
        v.regime = "non-Lipschitz g admissible";
    else if (v.threshold <= 2.0)
        v.regime = "beyond classical Bony (kappa < 2 admissible)";
    else
        v.regime = "classical regime (kappa > 2 required)";
    return v;
}

}  // namespace nyv
