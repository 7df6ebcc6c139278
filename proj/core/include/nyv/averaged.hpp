#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nyv/noise.hpp"
#include "nyv/spectral.hpp"

namespace nyv {

// Value domain [-x_max, x_max) treated as a torus of period 2 x_max.
// Solution values must stay in [-x_max/2, x_max/2] so the periodization
// never wraps for lifted reads.
struct ValueGrid {
    double x_max = 4.0;
    std::size_t m = 256;

    ValueGrid() = default;
    ValueGrid(double x_max_, std::size_t m_);
    SpectralGrid spectral() const { return SpectralGrid(m, 2.0 * x_max, -x_max); }
};

// Two-parameter table A[i] = integral over [0, t_i] of g(. + omega_r) dr on
// the value grid, with spectral derivatives up to order 3 per time slice.
class AveragedField {
public:
    AveragedField() = default;

    const SpectralGrid& value_grid() const { return vgrid_; }
    double x_max() const { return -vgrid_.origin; }
    const std::vector<double>& t_grid() const { return t_; }
    std::size_t n_t() const { return t_.size(); }
    const std::vector<double>& row(std::size_t i) const { return table_[i]; }
    const std::vector<double>& derivative_row(int order, std::size_t i) const;
    TorusField slice(std::size_t i) const { return TorusField(vgrid_, table_[i]); }

    const Weight& weight() const { return weight_; }
    double gamma_declared() const { return gamma_declared_; }
    double kappa_declared() const { return kappa_declared_; }
    void declare_exponents(double gamma, double kappa) {
        gamma_declared_ = gamma;
        kappa_declared_ = kappa;
    }
    void set_weight(Weight w) { weight_ = w; }

    std::size_t index_of_time(double t) const;

    friend AveragedField compute_averaged_field(const TorusField&, const SampledPath&,
                                                const ValueGrid&, const std::vector<double>&);

private:
    SpectralGrid vgrid_;
    std::vector<double> t_;
    std::vector<std::vector<double>> table_;
    std::array<std::vector<std::vector<double>>, 3> deriv_;
    Weight weight_ = Weight::unit();
    double gamma_declared_ = 0.75;
    double kappa_declared_ = 3.0;
};

// Left-rule quadrature of g(x + omega_r) over the fine path grid; the path
// grid must refine t_grid with integer ratio >= 4, and max|omega| + x_max/2
// must not exceed x_max.
AveragedField compute_averaged_field(const TorusField& g, const SampledPath& omega,
                                     const ValueGrid& vgrid, const std::vector<double>& t_grid);

// x -> (A[t] - A[s])(theta(x)) by periodic cubic interpolation in the value
// direction; theta must take values in [-x_max/2, x_max/2].
TorusField lift_apply(const AveragedField& A, double s, double t, const TorusField& theta);
// Same with the first spectral value-derivative of the table.
TorusField lift_gradient(const AveragedField& A, double s, double t, const TorusField& theta);

struct TimeRegularityEstimate {
    double gamma_hat = 0.0;
    std::vector<double> scales;  // |t - s|
    std::vector<double> norms;   // mean C^kappa(w) norm at that scale
};

// Log-log slope of the C^{kappa_eval}(w) increment norm across dyadic gaps;
// the two coarsest and two finest scales are dropped when enough remain.
TimeRegularityEstimate estimate_time_regularity(const AveragedField& A, double kappa_eval);

struct SpaceGainEstimate {
    double gain = 0.0;
    double kappa_in = 0.0;
    double kappa_out = 0.0;
    bool saturated = false;
};

SpaceGainEstimate estimate_space_gain(const AveragedField& A, const TorusField& g, int j_lo,
                                      int j_hi);

enum class PathKind { lfsm, zero };

struct TailCheckParams {
    int j = 5;
    double s = 0.25;
    double t = 0.75;
    double alpha = 2.0;
    double hurst = 0.4;
    double nu = 0.5;
    std::size_t n_samples = 5000;
    std::uint64_t seed = 0;
    std::size_t n_path = 193;   // fine path points on [0, t]; s must be a grid time
    double p = 2.0;             // L^p(w) norm of the block average
    Weight w = Weight::unit();
    PathKind path = PathKind::lfsm;
    double tail_vmax_factor = 50.0;
};

struct TailReport {
    std::vector<std::pair<double, double>> quantiles;  // (q, R_q)
    double slope = 0.0;      // regression of log P(R >= x) on x^2
    double intercept = 0.0;
    double r2 = 0.0;
    double median_ratio = 0.0;
    double median_unnormalized = 0.0;
    std::vector<double> ratios;  // sorted
};

// Monte-Carlo ensemble of the normalized block-average ratios
// R = ||int_s^t Delta_j g(. + L_r) dr||_{L^p(w)} /
//     (|t-s|^{1-nu/2} 2^{-j nu/(2H)} ||Delta_j g||_{L^p(w)}).
TailReport tail_check_blocks(const TorusField& g, const TailCheckParams& prm);

// Growth function H(z) = sup_{|v| <= z} w^{-1}(v) * |||A|||, where |||A|||
// is the time-Hoelder norm of the table in C^kappa(w) measured over dyadic
// gaps.  Monotone by construction; feeds the sewing/solver bounds.
struct GrowthTable {
    double hoelder_norm = 0.0;
    Weight w = Weight::unit();
    double operator()(double z) const;
};

GrowthTable growth_table(const AveragedField& A, double kappa, double gamma);

// Time-Hoelder norm proxy of a table difference in C^kappa(w), used by the
// stability experiment; pairs are restricted to dyadic gaps.
double table_difference_holder_norm(const AveragedField& A, const AveragedField& B, double kappa,
                                    double gamma);

// Gaussian mollification of g on its own grid: multiplies the spectrum by
// exp(-(lambda h)^2 / 2).  h = 0 returns g bit-for-bit.
TorusField mollify_gaussian(const TorusField& g, double h);

}  // namespace nyv
