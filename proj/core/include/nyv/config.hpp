#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nyv {

// Flat, typed experiment configuration.  Text form is "key = value" lines
// with '#' comments; unknown keys are rejected by name.  Units are part of
// the key names (horizon_t, grid_n, ...).
struct ExperimentConfig {
    std::string command = "simulate";

    // spatial grid and value grid
    std::uint64_t grid_n = 256;
    double grid_period = 1.0;
    std::uint64_t value_m = 256;
    double value_xmax = 4.0;

    // stochastic ingredients
    double alpha = 2.0;
    double hurst = 1.0 / 3.0;
    double nu = 0.5;
    std::string omega_kind = "lfsm";  // lfsm | zero
    std::string xi_kind = "smooth";   // white | smooth | one
    double xi_scale = 1.0;
    std::string g_kind = "sin";  // sin | weierstrass | smooth_step | one | zero
    double g_scale = 1.0;
    std::string b_kind = "none";  // none | sin | smooth_step | one
    double b_scale = 1.0;

    // exponents
    double beta = 0.8;
    double vartheta = 0.1;
    double gamma = 0.75;
    double kappa = 3.0;
    double sigma = 0.27;

    // weight
    std::string weight_kind = "constant";  // constant | polynomial
    double weight_lambda = 2.0;

    // horizon and grids
    double horizon_t = 0.1;
    std::uint64_t out_times = 64;
    std::uint64_t fine_per_out = 32;
    std::uint64_t path_refine = 4;

    // seeds and ensembles
    std::uint64_t seed = 12345;
    std::uint64_t samples = 20;

    // solver knobs
    double picard_tol = 1e-8;
    std::uint64_t picard_kmax = 50;
    double safety = 0.5;
    std::uint64_t tau_min_exp = 14;
    double sewing_tol = 1e-7;
    std::uint64_t sewing_nmax = 10;

    // regularity estimation
    double reg_kappa_eval = 0.0;

    // tail ensemble
    std::uint64_t tail_j = 5;
    double tail_s = 0.25;
    double tail_t = 0.75;
    std::uint64_t tail_nsamples = 5000;
    std::uint64_t tail_npath = 193;

    // stability sweep, widths in units of the value-grid spacing
    std::string mollifier_widths_dx = "8,4,2,1";

    void validate() const;
    std::string canonical_text() const;       // sorted key = value lines
    std::uint64_t config_hash() const;        // FNV-1a of the canonical text
    static ExperimentConfig parse_file(const std::filesystem::path& file);
    static ExperimentConfig parse_text(const std::string& text);
    void apply_override(const std::string& key, const std::string& value);
};

std::vector<double> parse_double_list(const std::string& csv);

}  // namespace nyv
