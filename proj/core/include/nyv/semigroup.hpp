#pragma once

#include <vector>

#include "nyv/spectral.hpp"

namespace nyv {

// Fractional heat semigroup as a Fourier multiplier e^{-|2 pi k / period|^alpha t}.
struct FracHeatOp {
    double alpha = 2.0;
    SpectralGrid grid;

    FracHeatOp(double alpha_, SpectralGrid grid_);
    // Multiplier row for time step t (one factor per spectrum slot).
    std::vector<double> multiplier(double t) const;
};

TorusField heat_apply(const FracHeatOp& op, double t, const TorusField& f);

// S_t f = P_t (xi f), the singular Volterra operator of the multiplicative
// equation; declared singularity rho = (beta + vartheta)/2.
struct SingularVolterraOp {
    FracHeatOp heat;
    TorusField xi;
    double beta = 0.0;
    double vartheta = 0.0;

    SingularVolterraOp(FracHeatOp heat_, TorusField xi_, double beta_, double vartheta_);
    double rho() const { return 0.5 * (beta + vartheta); }
};

TorusField singular_apply(const SingularVolterraOp& op, double t, const TorusField& f);

// Measured suprema of the three singular-operator ratios, per exponent pair.
struct RatioStat {
    int estimate_id = 0;  // 1, 2 or 3
    double theta = 0.0;
    double theta_prime = 0.0;
    double max_ratio = 0.0;
    double median_ratio = 0.0;
    std::size_t n_samples = 0;
};

struct HypothesisReport {
    std::vector<RatioStat> stats;
    // Pooled ratios per estimate family, for stability checks across runs.
    std::vector<double> pooled[3];
};

// Measures the three ratios of the singular-operator hypothesis in the
// C^beta norm over the sample fields, the time grid and the exponent grids.
// Degenerate rectangle configurations (tau' <= t) are skipped.
HypothesisReport verify_kernel_hypothesis(const SingularVolterraOp& op, double beta,
                                          const std::vector<TorusField>& samples,
                                          const std::vector<double>& t_grid,
                                          const std::vector<double>& theta_grid);

}  // namespace nyv
