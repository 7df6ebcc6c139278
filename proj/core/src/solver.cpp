#include "nyv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace nyv {

void MSHEProblem::validate() const {
    const auto& e = exponents;
    if (!(alpha > 0.0) || alpha > 2.0) throw config_error("alpha must lie in (0, 2]");
    if (!(e.vartheta < e.beta)) throw config_error("need vartheta < beta");
    if (!(e.beta < alpha - e.vartheta)) throw config_error("need beta < alpha - vartheta");
    const double rho = e.rho();
    if (!(rho >= 0.0 && rho < 1.0)) throw config_error("need 0 <= rho < 1");
    if (!(e.gamma > 0.5)) throw config_error("need gamma > 1/2");
    if (!(1.0 - e.gamma < e.sigma && e.sigma < e.gamma - rho))
        throw config_error("need 1 - gamma < sigma < gamma - rho");
    if (!(horizon > 0.0)) throw config_error("horizon must be positive");
}

double picard_window_bound(double p_seminorm, double p0_norm, double c_at_ball, double eps) {
    if (c_at_ball <= 0.0) return kInf;
    (void)p0_norm;  // already folded into c_at_ball by the caller
    return std::pow(4.0 * (1.0 + p_seminorm) * c_at_ball, -1.0 / eps);
}

namespace {

struct PreparedCell {
    std::size_t u_idx = 0;  // fine index of the left endpoint
    std::vector<std::vector<std::complex<double>>> prep;  // one per pair
};

struct Pipeline {
    const MSHEProblem* prob;
    SolverConfig cfg;
    SpectralGrid grid;
    FracHeatOp heat;

    // rebuildable state (range management may enlarge the value box)
    AveragedField A;
    std::optional<AveragedField> Ab;
    TorusField g;
    std::optional<TorusField> b;

    std::unique_ptr<HeatXiOperator> Sg;
    std::unique_ptr<HeatOperator> Sb;
    std::unique_ptr<AveragedFieldDriver> Xg;
    std::unique_ptr<AveragedFieldDriver> Xb;
    std::vector<SewingPair> pairs;

    std::size_t n_fine = 0;  // fine cells
    double dfine = 0.0;
    std::vector<double> fine_t;
    std::size_t per_out = 0;

    std::vector<PreparedCell> history;
    std::vector<std::string> log;

    Pipeline(const MSHEProblem& p, const SolverConfig& c, bool with_drift)
        : prob(&p), cfg(c), grid(p.xi.grid()), heat(p.alpha, p.xi.grid()), A(p.averaged), g(p.g) {
        p.validate();
        n_fine = A.n_t() - 1;
        if (cfg.n_out == 0 || n_fine % cfg.n_out != 0)
            throw config_error("averaged-field grid must refine the output grid");
        per_out = n_fine / cfg.n_out;
        dfine = p.horizon / static_cast<double>(n_fine);
        if (std::abs(A.t_grid().back() - p.horizon) > 1e-9 * std::max(p.horizon, 1.0))
            throw config_error("averaged-field horizon does not match the problem");
        fine_t = A.t_grid();

        if (with_drift) {
            if (!p.averaged_drift) throw config_error("drifted solve needs averaged_drift");
            Ab = *p.averaged_drift;
            b = p.b;
        }
        build_operators();
    }

    void build_operators() {
        pairs.clear();
        Sg = std::make_unique<HeatXiOperator>(
            SingularVolterraOp(heat, prob->xi, prob->exponents.beta, prob->exponents.vartheta));
        Xg = std::make_unique<AveragedFieldDriver>(A, prob->exponents.gamma,
                                                   prob->exponents.kappa);
        pairs.push_back({Sg.get(), Xg.get()});
        if (Ab) {
            // drift: plain heat semigroup, no singularity
            Sb = std::make_unique<HeatOperator>(heat, 0.0);
            Xb = std::make_unique<AveragedFieldDriver>(*Ab, prob->exponents.gamma,
                                                       prob->exponents.kappa);
            pairs.push_back({Sb.get(), Xb.get()});
        }
    }

    double eps() const {
        return prob->exponents.gamma - prob->exponents.rho() - prob->exponents.sigma;
    }

    double growth_sum(double z) const {
        double s = 0.0;
        for (const auto& pr : pairs) s += pr.X->growth(z);
        return s;
    }

    // p_t = P_t psi + history sum, on fine indices [a, a+cells]
    SingularHolderPath free_term(std::size_t a, std::size_t cells) const {
        SingularHolderPath p;
        p.sigma = prob->exponents.sigma;
        p.t.resize(cells + 1);
        p.fields.reserve(cells + 1);
        for (std::size_t j = 0; j <= cells; ++j) {
            const double t_abs = fine_t[a + j];
            p.t[j] = static_cast<double>(j) * dfine;
            TorusField f = heat_apply(heat, t_abs, prob->psi);
            if (!history.empty()) {
                std::vector<std::complex<double>> acc(grid.n, std::complex<double>(0.0, 0.0));
                for (std::size_t pidx = 0; pidx < pairs.size(); ++pidx) {
                    for (const auto& cell : history) {
                        const auto m =
                            pairs[pidx].S->multiplier(t_abs - fine_t[cell.u_idx]);
                        const auto& pm = cell.prep[pidx];
                        for (std::size_t k = 0; k < grid.n; ++k) acc[k] += m[k] * pm[k];
                    }
                }
                f += TorusField::from_spectrum(grid, std::move(acc));
            }
            p.fields.push_back(std::move(f));
        }
        return p;
    }

    // one application of Theta over the window grid (local clock)
    std::vector<TorusField> theta_of(const SingularHolderPath& y, std::size_t a) const {
        std::vector<OffsetDriver> offs;
        offs.reserve(pairs.size());
        const double off = fine_t[a];
        for (const auto& pr : pairs) offs.emplace_back(*pr.X, off);
        std::vector<SewingPair> local;
        for (std::size_t i = 0; i < pairs.size(); ++i) local.push_back({pairs[i].S, &offs[i]});
        return sew_on_grid(local, y);
    }

    void ensure_range(const TorusField& theta_start) {
        const double half = 0.5 * A.x_max();
        for (int attempt = 0; attempt < 3; ++attempt) {
            if (sup_norm(theta_start) + prob->omega.max_abs() <= A.x_max() &&
                sup_norm(theta_start) <= 0.95 * half)
                return;
            if (!prob->g_callable)
                throw numeric_error("solution left the averaged field's safe box and no g "
                                    "callable is available for a rebuild");
            const double new_xmax = 2.0 * A.x_max();
            std::ostringstream msg;
            msg << "rebuilding averaged field with x_max = " << new_xmax;
            log.push_back(msg.str());
            ValueGrid vg(new_xmax, A.value_grid().n);
            const SpectralGrid sg = vg.spectral();
            std::vector<double> gv(sg.n);
            for (std::size_t i = 0; i < sg.n; ++i) gv[i] = prob->g_callable(sg.x(i));
            g = TorusField(sg, std::move(gv));
            A = compute_averaged_field(g, prob->omega, vg, fine_t);
            A.declare_exponents(prob->exponents.gamma, prob->exponents.kappa);
            A.set_weight(prob->averaged.weight());
            if (Ab && prob->b_callable) {
                std::vector<double> bv(sg.n);
                for (std::size_t i = 0; i < sg.n; ++i) bv[i] = prob->b_callable(sg.x(i));
                b = TorusField(sg, std::move(bv));
                Ab = compute_averaged_field(*b, prob->omega, vg, fine_t);
                Ab->declare_exponents(prob->exponents.gamma, prob->exponents.kappa);
            }
            build_operators();
        }
        throw numeric_error("averaged-field box rebuild did not reach the solution range");
    }
};

}  // namespace

static Solution run_solver(const MSHEProblem& problem, const SolverConfig& config,
                           bool with_drift) {
    Pipeline pl(problem, config, with_drift);
    const Exponents& ex = problem.exponents;
    const double eps = pl.eps();
    const double tau_min =
        problem.horizon / std::pow(2.0, static_cast<double>(config.tau_min_exp));

    Solution sol;
    sol.fine_times = pl.fine_t;
    sol.theta_fine.reserve(pl.n_fine + 1);
    sol.theta_fine.push_back(problem.psi);  // P_0 psi = psi

    std::size_t a = 0;
    bool early = false;
    while (a < pl.n_fine) {
        pl.ensure_range(sol.theta_fine.back());
        const std::size_t remaining = pl.n_fine - a;

        // measure the operator constant on a short probe of the free term
        const std::size_t probe = std::min(remaining, config.probe_out_cells * pl.per_out);
        SingularHolderPath p_probe = pl.free_term(a, probe);
        const double p_semi = singular_holder_seminorm(p_probe);
        const double p0 = sup_norm(p_probe.fields.front());
        double p_sup = 0.0;
        for (const auto& f : p_probe.fields) p_sup = std::max(p_sup, sup_norm(f));

        std::vector<TorusField> theta_p = pl.theta_of(p_probe, a);
        SingularHolderPath tp;
        tp.t = p_probe.t;
        tp.sigma = ex.sigma;
        tp.fields = std::move(theta_p);
        const double theta_p_semi = singular_holder_seminorm(tp);
        const double tau_probe = static_cast<double>(probe) * pl.dfine;

        const double h_at_sup = pl.growth_sum(p_sup);
        double c_op = 0.0;
        if (h_at_sup > 0.0 && theta_p_semi > 0.0)
            c_op = theta_p_semi /
                   (h_at_sup * (1.0 + p_semi) * std::pow(tau_probe, eps));
        const double c_ball = c_op * pl.growth_sum(1.0 + p0 + p_semi);
        const double tau_bound = picard_window_bound(p_semi, p0, c_ball, eps);
        const double tau_target = config.safety * tau_bound;

        if (tau_target < tau_min) {
            early = true;
            std::ostringstream msg;
            msg << "window bound " << tau_target << " fell below tau_min " << tau_min << " at t = "
                << pl.fine_t[a];
            pl.log.push_back(msg.str());
            break;
        }

        std::size_t wc = remaining;
        if (tau_target < static_cast<double>(remaining) * pl.dfine)
            wc = std::max<std::size_t>(1, static_cast<std::size_t>(tau_target / pl.dfine));
        wc = std::min(wc, remaining);

        // free term on the window (reuse the probe prefix when it covers it)
        SingularHolderPath p_win;
        if (wc <= probe) {
            p_win.sigma = ex.sigma;
            p_win.t.assign(p_probe.t.begin(), p_probe.t.begin() + static_cast<long>(wc) + 1);
            p_win.fields.assign(p_probe.fields.begin(),
                                p_probe.fields.begin() + static_cast<long>(wc) + 1);
        } else {
            p_win = pl.free_term(a, wc);
        }

        // Picard iteration theta^{k+1} = p + Theta(theta^k), theta^0 = p
        SingularHolderPath y = p_win;
        WindowInfo info;
        info.start = pl.fine_t[a];
        info.tau = static_cast<double>(wc) * pl.dfine;
        info.tau_bound = tau_bound;
        double d_prev = -1.0;
        int bad_contractions = 0;
        std::vector<TorusField> last_iterate_fields = y.fields;
        for (int k = 0; k < config.picard_kmax; ++k) {
            std::vector<TorusField> th = pl.theta_of(y, a);
            SingularHolderPath cand;
            cand.t = y.t;
            cand.sigma = ex.sigma;
            cand.fields.reserve(th.size());
            for (std::size_t j = 0; j < th.size(); ++j)
                cand.fields.push_back(p_win.fields[j] + th[j]);

            SingularHolderPath diff;
            diff.t = y.t;
            diff.sigma = ex.sigma;
            for (std::size_t j = 0; j < th.size(); ++j)
                diff.fields.push_back(cand.fields[j] - y.fields[j]);
            const double d = singular_holder_seminorm(diff);

            SingularHolderPath ball;
            ball.t = y.t;
            ball.sigma = ex.sigma;
            for (std::size_t j = 0; j < th.size(); ++j)
                ball.fields.push_back(cand.fields[j] - p_win.fields[j]);
            info.ball_max = std::max(info.ball_max, singular_holder_seminorm(ball));

            info.picard_iters = k + 1;
            last_iterate_fields = y.fields;
            y.fields = std::move(cand.fields);

            if (info.ball_max > 1.0 + 1e-12)
                throw numeric_error("picard iterate left the unit ball around the free term");
            if (d_prev > 0.0) {
                const double c = d / d_prev;
                info.contraction_max = std::max(info.contraction_max, c);
                if (c >= 1.0 && d > config.picard_tol) {
                    if (++bad_contractions >= 2) {
                        std::ostringstream msg;
                        msg << "picard divergence: contraction " << c << " at window start "
                            << info.start << " (tau " << info.tau << ", d " << d << ")";
                        throw numeric_error(msg.str());
                    }
                } else {
                    bad_contractions = 0;
                }
            }
            d_prev = d;
            if (d < config.picard_tol) {
                info.converged = true;
                break;
            }
            if (k == config.picard_kmax - 1) info.converged = false;
        }

        // glue defect: window's own value at local 0 vs the carried state
        info.glue_defect = sup_norm(y.fields.front() - sol.theta_fine.back());

        // sewing convergence report at the window endpoint (diagnostic)
        {
            std::vector<OffsetDriver> offs;
            const double off = pl.fine_t[a];
            for (const auto& pr : pl.pairs) offs.emplace_back(*pr.X, off);
            SewingResult sr = sewing_integral(*pl.pairs[0].S, offs[0], y, y.t.back(),
                                              config.sewing_n_max, config.sewing_tol);
            info.sewing_levels = sr.report.levels.back();
        }

        // append history cells prepared from the iterate that produced the
        // final window path, so the carried free term reproduces it
        for (std::size_t j = 0; j < wc; ++j) {
            PreparedCell cell;
            cell.u_idx = a + j;
            for (const auto& pr : pl.pairs) {
                cell.prep.push_back(pr.S->prepare(pr.X->increment(
                    pl.fine_t[a + j], pl.fine_t[a + j + 1], last_iterate_fields[j])));
            }
            pl.history.push_back(std::move(cell));
        }

        for (std::size_t j = 1; j <= wc; ++j) sol.theta_fine.push_back(y.fields[j]);
        sol.windows.push_back(info);
        a += wc;
    }

    sol.status = early ? SolveStatus::horizon_reached : SolveStatus::completed;
    const std::size_t reached = sol.theta_fine.size() - 1;
    sol.reached_time = pl.fine_t[reached];
    sol.fine_times.resize(reached + 1);
    sol.log = pl.log;

    // output grid
    for (std::size_t i = 0; i * pl.per_out <= reached; ++i) {
        const std::size_t idx = i * pl.per_out;
        sol.out_times.push_back(pl.fine_t[idx]);
        sol.theta_out.push_back(sol.theta_fine[idx]);
        const double w = problem.omega.values[problem.omega.index_of(pl.fine_t[idx])];
        sol.omega_out.push_back(w);
        TorusField u = sol.theta_fine[idx];
        u.add_scalar(w);
        sol.u_out.push_back(std::move(u));
    }

    // seminorm over the full path plus spot checks at neighbouring sigma
    SingularHolderPath full;
    full.t = sol.fine_times;
    full.fields = sol.theta_fine;
    full.sigma = ex.sigma;
    sol.seminorm = singular_holder_seminorm(full);
    for (double ds : {-0.05, 0.05}) {
        const double s2 = ex.sigma + ds;
        if (s2 > 0.0 && s2 < 1.0) {
            full.sigma = s2;
            sol.sigma_spot_checks.emplace_back(s2, singular_holder_seminorm(full));
        }
    }
    return sol;
}

Solution solve_mshe(const MSHEProblem& problem, const SolverConfig& config) {
    return run_solver(problem, config, false);
}

Solution solve_drifted(const MSHEProblem& problem, const SolverConfig& config) {
    return run_solver(problem, config, true);
}

std::vector<double> solution_residuals(const MSHEProblem& problem, const SolverConfig& config,
                                       const Solution& sol) {
    Pipeline pl(problem, config, problem.averaged_drift.has_value());
    const std::size_t n = sol.fine_times.size() - 1;

    // fresh prepared cells from the returned path
    std::vector<PreparedCell> cells;
    cells.reserve(n);
    for (std::size_t m = 0; m < n; ++m) {
        PreparedCell cell;
        cell.u_idx = m;
        for (const auto& pr : pl.pairs)
            cell.prep.push_back(pr.S->prepare(
                pr.X->increment(sol.fine_times[m], sol.fine_times[m + 1], sol.theta_fine[m])));
        cells.push_back(std::move(cell));
    }

    std::vector<double> res;
    for (std::size_t oi = 0; oi < sol.out_times.size(); ++oi) {
        const double t = sol.out_times[oi];
        if (t == 0.0) {
            res.push_back(sup_norm(sol.theta_out[0] - problem.psi));
            continue;
        }
        const std::size_t t_idx = pl.A.index_of_time(t);
        std::vector<std::complex<double>> acc(pl.grid.n, std::complex<double>(0.0, 0.0));
        for (std::size_t pidx = 0; pidx < pl.pairs.size(); ++pidx) {
            for (std::size_t m = 0; m < t_idx; ++m) {
                const auto mult = pl.pairs[pidx].S->multiplier(t - sol.fine_times[m]);
                const auto& pm = cells[m].prep[pidx];
                for (std::size_t k = 0; k < pl.grid.n; ++k) acc[k] += mult[k] * pm[k];
            }
        }
        const TorusField theta_int = TorusField::from_spectrum(pl.grid, std::move(acc));
        const TorusField expect = heat_apply(pl.heat, t, problem.psi) + theta_int;
        res.push_back(sup_norm(sol.theta_out[oi] - expect));
    }
    return res;
}

std::vector<TorusField> classical_reference_solve(double alpha, const TorusField& xi,
                                                  const std::function<double(double)>& g,
                                                  const TorusField& psi, double T,
                                                  std::size_t n_t) {
    if (n_t < 1) throw config_error("reference solve needs n_t >= 1");
    const FracHeatOp heat(alpha, psi.grid());
    const double guard = 1e8;

    auto apply_g = [&](const TorusField& u) {
        std::vector<double> v(u.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = g(u.values()[i]);
        return TorusField(u.grid(), std::move(v));
    };

    auto run = [&](std::size_t steps) {
        const double dt = T / static_cast<double>(steps);
        std::vector<TorusField> out;
        out.reserve(steps + 1);
        out.push_back(psi);
        TorusField u = psi;
        for (std::size_t i = 0; i < steps; ++i) {
            TorusField rhs = dealiased_product(xi, apply_g(u));
            u = heat_apply(heat, dt, u) + dt * heat_apply(heat, dt, rhs);
            if (sup_norm(u) > guard) throw numeric_error("reference solver blow-up");
            out.push_back(u);
        }
        return out;
    };

    const std::vector<TorusField> coarse = run(n_t);
    const std::vector<TorusField> fine = run(2 * n_t);
    std::vector<TorusField> out;
    out.reserve(n_t + 1);
    for (std::size_t i = 0; i <= n_t; ++i) {
        out.push_back(2.0 * fine[2 * i] - coarse[i]);
    }
    return out;
}

std::vector<StabilityRow> stability_experiment(const MSHEProblem& problem,
                                               const std::vector<double>& widths,
                                               const SolverConfig& config) {
    const Solution base = solve_mshe(problem, config);
    const ValueGrid vg(problem.averaged.x_max(), problem.averaged.value_grid().n);

    std::vector<StabilityRow> rows;
    for (double h : widths) {
        MSHEProblem ph = problem;
        ph.g = mollify_gaussian(problem.g, h);
        ph.averaged = compute_averaged_field(ph.g, problem.omega, vg, problem.averaged.t_grid());
        ph.averaged.declare_exponents(problem.exponents.gamma, problem.exponents.kappa);
        ph.averaged.set_weight(problem.averaged.weight());
        ph.g_callable = nullptr;  // mollified samples have no closed form
        const Solution sh = solve_mshe(ph, config);

        StabilityRow row;
        row.width = h;
        row.averaged_err = table_difference_holder_norm(ph.averaged, problem.averaged,
                                                        problem.exponents.kappa,
                                                        problem.exponents.gamma);
        SingularHolderPath diff;
        const std::size_t n = std::min(sh.theta_fine.size(), base.theta_fine.size());
        diff.t.assign(base.fine_times.begin(), base.fine_times.begin() + static_cast<long>(n));
        diff.sigma = problem.exponents.sigma;
        for (std::size_t i = 0; i < n; ++i)
            diff.fields.push_back(sh.theta_fine[i] - base.theta_fine[i]);
        row.solution_err = singular_holder_seminorm(diff);
        row.ratio = row.averaged_err > 0.0 ? row.solution_err / row.averaged_err : 0.0;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace nyv
