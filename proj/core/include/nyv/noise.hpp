#pragma once

#include <cstdint>
#include <vector>

#include "nyv/rng.hpp"
#include "nyv/spectral.hpp"

namespace nyv {

// Scalar path sampled on a uniform grid; the common currency between the
// noise samplers and the averaged-field machinery.
struct SampledPath {
    std::vector<double> t;
    std::vector<double> values;

    static SampledPath zero(double T, std::size_t n_t);
    double dt() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
    double max_abs() const;
    // Index of grid time s (within 1e-9 * span relative tolerance).
    std::size_t index_of(double s) const;
};

// i.i.d. symmetric alpha-stable increments with scale dt^{1/alpha} under the
// convention E exp(i xi L_t) = exp(-|xi|^alpha t).
struct StableIncrements {
    double alpha = 2.0;
    double dt = 1.0;
    std::vector<double> values;
    std::uint64_t seed = 0;
};

StableIncrements sample_stable_increments(double alpha, double dt, std::size_t n, std::uint64_t seed);

// Linear fractional stable motion on a uniform grid, moving-average form.
// Weights are exact per-cell integrals of the kernel (t-v)^{H-1/alpha}; the
// tail integral over (0, tail_vmax] uses cells matching the grid step out to
// T and geometric growth beyond.
class LFSMPath {
public:
    LFSMPath() = default;

    double alpha() const { return alpha_; }
    double hurst() const { return hurst_; }
    double tail_vmax() const { return tail_vmax_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<double>& t_grid() const { return path_.t; }
    const std::vector<double>& values() const { return path_.values; }
    const SampledPath& path() const { return path_; }
    // Reported truncation error scale of the tail integral.
    double tail_truncation_error() const { return tail_trunc_err_; }

    // Splits the path value at grid time r > s into the part driven by
    // increments in (s, r] and the F_s-measurable remainder.
    std::pair<double, double> decompose(double s, double r) const;

    friend LFSMPath sample_lfsm(double, double, double, std::size_t, double, std::uint64_t);

private:
    double alpha_ = 2.0, hurst_ = 0.5, tail_vmax_ = 0.0, tail_trunc_err_ = 0.0;
    std::uint64_t seed_ = 0;
    SampledPath path_;
    std::vector<double> drive_incr_;   // per grid cell, stream kDriveStream
    std::vector<double> tail_edges_;   // tail cell edges, tail_edges_[0] = 0
    std::vector<double> tail_incr_;    // per tail cell, stream kTailStream
    std::vector<double> kernel_cdf_;   // (l dt)^q / (q dt), lag-indexed
    std::size_t tail_uniform_cells_ = 0;

    double drive_weight(double t, std::size_t cell) const;
    double tail_weight(double t, std::size_t cell) const;
    double tail_sum(std::size_t i) const;
};

LFSMPath sample_lfsm(double alpha, double hurst, double T, std::size_t n_t, double tail_vmax,
                     std::uint64_t seed);

inline std::pair<double, double> decompose_lfsm(const LFSMPath& p, double s, double r) {
    return p.decompose(s, r);
}

// Spatial white noise on the torus: unit spectral density, zero mean mode.
struct WhiteNoiseField {
    TorusField field;
    double regularity_target = -0.5;
};

WhiteNoiseField sample_white_noise(const SpectralGrid& grid, std::uint64_t seed);

}  // namespace nyv
