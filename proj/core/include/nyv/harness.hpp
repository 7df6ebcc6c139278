#pragma once

#include <filesystem>
#include <string>

#include "nyv/config.hpp"
#include "nyv/solver.hpp"

namespace nyv {

// Ingredient builders shared by the CLI commands and the test suites.
// Seed namespaces: omega path uses cfg.seed, the spatial noise field uses
// cfg.seed + 1000003, auxiliary sample fields use cfg.seed + 2000003,
// ensembles derive member seeds with mix_seed(cfg.seed, i).
TorusField make_g(const ExperimentConfig& cfg);
std::function<double(double)> make_g_callable(const ExperimentConfig& cfg);
TorusField make_b(const ExperimentConfig& cfg);
std::function<double(double)> make_b_callable(const ExperimentConfig& cfg);
TorusField make_xi(const ExperimentConfig& cfg);
TorusField make_psi(const ExperimentConfig& cfg);
SampledPath make_omega(const ExperimentConfig& cfg);
std::vector<double> solver_fine_grid(const ExperimentConfig& cfg);
Weight make_weight(const ExperimentConfig& cfg);
MSHEProblem build_problem(const ExperimentConfig& cfg);
SolverConfig solver_config(const ExperimentConfig& cfg);

// Executes the configured command and writes all artifacts plus
// manifest.nyv and artifacts.csv into out_dir.  Returns the process exit
// code (0 success, 3 when a convergence run stops at max level).
int run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct FeasibilityVerdict {
    double threshold = 0.0;  // kappa must exceed 3 - (1 - vartheta)/(2 hurst)
    bool admissible = false;
    std::string regime;
};

FeasibilityVerdict feasibility_report(double vartheta, double hurst, double kappa_in);

}  // namespace nyv
