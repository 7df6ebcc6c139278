#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nyv/averaged.hpp"
#include "nyv/noise.hpp"
#include "nyv/sewing.hpp"

namespace nyv {

struct Exponents {
    double beta = 0.8;
    double vartheta = 0.1;
    double gamma = 0.75;
    double kappa = 3.0;
    double sigma = 0.27;

    double rho() const { return 0.5 * (beta + vartheta); }
};

// Full problem statement.  The averaged field's time grid is the solver's
// fine grid; omega must be sampled on a refinement of it.
struct MSHEProblem {
    double alpha = 2.0;
    TorusField xi;
    TorusField psi;
    TorusField g;  // samples of g on the value grid (kept for rebuilds)
    AveragedField averaged;
    std::optional<TorusField> b;
    std::optional<AveragedField> averaged_drift;
    SampledPath omega;
    Exponents exponents;
    double horizon = 0.1;
    // optional callables allow rebuilding the averaged field on a larger box
    std::function<double(double)> g_callable;
    std::function<double(double)> b_callable;

    void validate() const;
};

struct SolverConfig {
    double picard_tol = 1e-8;
    int picard_kmax = 50;
    double safety = 0.5;
    int tau_min_exp = 14;  // tau_min = T / 2^tau_min_exp
    std::size_t n_out = 64;
    double sewing_tol = 1e-7;
    int sewing_n_max = 10;
    std::size_t probe_out_cells = 4;  // output cells used when measuring C
};

struct WindowInfo {
    double start = 0.0;
    double tau = 0.0;
    int picard_iters = 0;
    double contraction_max = 0.0;
    double ball_max = 0.0;
    int sewing_levels = 0;
    double glue_defect = 0.0;
    double tau_bound = 0.0;
    bool converged = true;
};

enum class SolveStatus { completed, horizon_reached };

struct Solution {
    std::vector<double> fine_times;
    std::vector<TorusField> theta_fine;
    std::vector<double> out_times;
    std::vector<TorusField> theta_out;
    std::vector<double> omega_out;
    std::vector<TorusField> u_out;  // u = theta + omega
    std::vector<WindowInfo> windows;
    SolveStatus status = SolveStatus::completed;
    double reached_time = 0.0;
    double seminorm = 0.0;
    std::vector<std::pair<double, double>> sigma_spot_checks;  // (sigma, seminorm)
    std::vector<std::string> log;
};

// Window length from the fixed-point condition, before the safety factor:
// [4 (1 + [p]_sigma) C(1 + |p_0| + [p]_sigma)]^{-1/eps}.
double picard_window_bound(double p_seminorm, double p0_norm, double c_at_ball, double eps);

Solution solve_mshe(const MSHEProblem& problem, const SolverConfig& config);
// Same pipeline with the drift driver added; the drift operator is the
// plain heat semigroup (rho_b = 0).
Solution solve_drifted(const MSHEProblem& problem, const SolverConfig& config);

// Residual of the fixed-point relation at every output time, recomputed
// from the returned path.
std::vector<double> solution_residuals(const MSHEProblem& problem, const SolverConfig& config,
                                       const Solution& sol);

// Exponential-integrator reference for the smooth case, second order by
// Richardson extrapolation on dt halving; returns n_t + 1 fields on [0, T].
std::vector<TorusField> classical_reference_solve(double alpha, const TorusField& xi,
                                                  const std::function<double(double)>& g,
                                                  const TorusField& psi, double T,
                                                  std::size_t n_t);

struct StabilityRow {
    double width = 0.0;
    double averaged_err = 0.0;  // ||T^w g_h - T^w g|| in the C^gamma C^kappa proxy
    double solution_err = 0.0;  // [theta_h - theta]_sigma
    double ratio = 0.0;
};

// Mollifier sweep g_h = g * Gaussian(h) with shared path and seeds.
std::vector<StabilityRow> stability_experiment(const MSHEProblem& problem,
                                               const std::vector<double>& widths,
                                               const SolverConfig& config);

}  // namespace nyv
