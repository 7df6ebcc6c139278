#include "nyv/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nyv {

namespace {
constexpr double kPi = std::numbers::pi;

// Standard symmetric alpha-stable variate from one (U, E) pair,
// U ~ Unif(-pi/2, pi/2), E ~ Exp(1).  Chambers-Mallows-Stuck for the
// general case; the alpha = 2 branch is the same law written as a
// Box-Muller pair, the alpha = 1 branch is Cauchy.
double stable_variate(double alpha, double u_unit, double e_unit) {
    const double U = kPi * (u_unit - 0.5);
    const double E = -std::log(e_unit);
    if (alpha == 2.0) return 2.0 * std::sin(U) * std::sqrt(E);
    if (alpha == 1.0) return std::tan(U);
    const double s = std::sin(alpha * U) / std::pow(std::cos(U), 1.0 / alpha);
    const double c = std::pow(std::cos((1.0 - alpha) * U) / E, (1.0 - alpha) / alpha);
    return s * c;
}
}  // namespace

SampledPath SampledPath::zero(double T, std::size_t n_t) {
    if (n_t < 2) throw config_error("path grid needs at least 2 points");
    SampledPath p;
    p.t.resize(n_t);
    p.values.assign(n_t, 0.0);
    const double dt = T / static_cast<double>(n_t - 1);
    for (std::size_t i = 0; i < n_t; ++i) p.t[i] = static_cast<double>(i) * dt;
    p.t.back() = T;
    return p;
}

double SampledPath::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

std::size_t SampledPath::index_of(double s) const {
    const double span = t.back() - t.front();
    const double dt_ = dt();
    const double rel = (s - t.front()) / dt_;
    const auto i = static_cast<std::size_t>(std::llround(rel));
    if (i >= t.size() || std::abs(t[i] - s) > 1e-9 * std::max(span, 1.0))
        throw config_error("time is not on the path grid");
    return i;
}

StableIncrements sample_stable_increments(double alpha, double dt, std::size_t n, std::uint64_t seed) {
    if (!(alpha > 0.0) || alpha > 2.0) throw config_error("alpha must lie in (0, 2]");
    if (!(dt > 0.0) || n < 1) throw config_error("need dt > 0 and n >= 1");
    StableIncrements out;
    out.alpha = alpha;
    out.dt = dt;
    out.seed = seed;
    out.values.resize(n);
    const CounterRng rng(seed, CounterRng::kDriveStream);
    const double scale = std::pow(dt, 1.0 / alpha);
    for (std::size_t i = 0; i < n; ++i) {
        double u, e;
        rng.uniforms(i, u, e);
        out.values[i] = scale * stable_variate(alpha, u, e);
    }
    return out;
}

// The grid is uniform, so the exact per-cell kernel integrals reduce to
// differences of one power table: with q = H - 1/alpha + 1,
//   int_{r_m}^{r_{m+1}} (t_i - v)^{q-1} dv = [(lag dt)^q - ((lag-1) dt)^q]/q,
// lag = i - m.  kernel_cdf_[l] stores (l dt)^q / (q dt).
double LFSMPath::drive_weight(double t, std::size_t cell) const {
    if (hurst_ == 1.0 / alpha_) return 1.0;
    const std::size_t i = path_.index_of(t);
    const std::size_t lag = i - cell;
    return kernel_cdf_[lag] - kernel_cdf_[lag - 1];
}

double LFSMPath::tail_weight(double t, std::size_t cell) const {
    const double p = hurst_ - 1.0 / alpha_;
    if (hurst_ == 1.0 / alpha_) return 0.0;
    const double v0 = tail_edges_[cell], v1 = tail_edges_[cell + 1];
    const double q = p + 1.0;
    const double shifted = (std::pow(t + v1, q) - std::pow(t + v0, q)) / q;
    const double plain = (std::pow(v1, q) - std::pow(v0, q)) / q;
    return (shifted - plain) / (v1 - v0);
}

LFSMPath sample_lfsm(double alpha, double hurst, double T, std::size_t n_t, double tail_vmax,
                     std::uint64_t seed) {
    if (!(alpha > 0.0) || alpha > 2.0) throw config_error("alpha must lie in (0, 2]");
    if (!(hurst > 0.0 && hurst < 1.0)) throw config_error("hurst must lie in (0, 1)");
    if (n_t < 2) throw config_error("lfsm needs n_t >= 2");
    if (!(T > 0.0)) throw config_error("lfsm needs T > 0");
    const double p = hurst - 1.0 / alpha;
    if (p <= -1.0)
        throw config_error("kernel exponent H - 1/alpha <= -1: cell integrals diverge");

    LFSMPath out;
    out.alpha_ = alpha;
    out.hurst_ = hurst;
    out.tail_vmax_ = tail_vmax;
    out.seed_ = seed;
    out.path_ = SampledPath::zero(T, n_t);

    const double dt = out.path_.dt();
    const std::size_t n_cells = n_t - 1;
    const bool collapse = (hurst == 1.0 / alpha);

    // driving increments share a stream and counter layout with
    // sample_stable_increments so the H = 1/alpha collapse is bit-exact
    out.drive_incr_ = sample_stable_increments(alpha, dt, n_cells, seed).values;

    const double q = p + 1.0;
    if (!collapse) {
        // lag tables for the uniform part of both integrals
        out.kernel_cdf_.resize(2 * n_cells + 2);
        for (std::size_t l = 0; l < out.kernel_cdf_.size(); ++l)
            out.kernel_cdf_[l] = std::pow(static_cast<double>(l) * dt, q) / (q * dt);
    }

    // tail cells: uniform out to T, then geometric growth to tail_vmax
    if (!collapse && tail_vmax > 0.0) {
        out.tail_edges_.push_back(0.0);
        double v = 0.0;
        std::size_t uniform_cells = 0;
        while (v < T - 0.5 * dt && v < tail_vmax) {
            v = std::min(v + dt, tail_vmax);
            out.tail_edges_.push_back(v);
            ++uniform_cells;
        }
        out.tail_uniform_cells_ = uniform_cells;
        while (v < tail_vmax) {
            v = std::min(v * 1.15, tail_vmax);
            out.tail_edges_.push_back(v);
        }
        const std::size_t k = out.tail_edges_.size() - 1;
        out.tail_incr_.resize(k);
        const CounterRng rng(seed, CounterRng::kTailStream);
        for (std::size_t m = 0; m < k; ++m) {
            double u, e;
            rng.uniforms(m, u, e);
            const double width = out.tail_edges_[m + 1] - out.tail_edges_[m];
            out.tail_incr_[m] = std::pow(width, 1.0 / alpha) * stable_variate(alpha, u, e);
        }
        out.tail_trunc_err_ = std::abs(p) * std::pow(tail_vmax, p);
    }

    // accumulate values; left-to-right order is part of the contract
    for (std::size_t i = 1; i < n_t; ++i) {
        double s = 0.0;
        if (collapse) {
            for (std::size_t m = 0; m < i; ++m) s += out.drive_incr_[m];
        } else {
            for (std::size_t m = 0; m < i; ++m)
                s += (out.kernel_cdf_[i - m] - out.kernel_cdf_[i - m - 1]) * out.drive_incr_[m];
            s += out.tail_sum(i);
        }
        out.path_.values[i] = s;
    }
    return out;
}

double LFSMPath::tail_sum(std::size_t i) const {
    if (tail_incr_.empty()) return 0.0;
    const double q = hurst_ - 1.0 / alpha_ + 1.0;
    const double dt = path_.dt();
    double s = 0.0;
    // uniform tail cells: (t_i + v_k) = (i + k) dt, one table lookup each
    for (std::size_t m = 0; m < tail_uniform_cells_; ++m) {
        const double w = (kernel_cdf_[i + m + 1] - kernel_cdf_[i + m]) -
                         (kernel_cdf_[m + 1] - kernel_cdf_[m]);
        s += w * tail_incr_[m];
    }
    const double ti = path_.t[i];
    for (std::size_t m = tail_uniform_cells_; m < tail_incr_.size(); ++m) {
        const double v0 = tail_edges_[m], v1 = tail_edges_[m + 1];
        const double shifted = (std::pow(ti + v1, q) - std::pow(ti + v0, q)) / q;
        const double plain = (std::pow(v1, q) - std::pow(v0, q)) / q;
        s += (shifted - plain) / (v1 - v0) * tail_incr_[m];
    }
    (void)dt;
    return s;
}

std::pair<double, double> LFSMPath::decompose(double s, double r) const {
    const std::size_t is = path_.index_of(s);
    const std::size_t ir = path_.index_of(r);
    if (!(is < ir)) throw config_error("decompose requires grid times s < r");
    const bool collapse = (hurst_ == 1.0 / alpha_);
    double indep = 0.0;
    for (std::size_t m = is; m < ir; ++m)
        indep += (collapse ? 1.0 : kernel_cdf_[ir - m] - kernel_cdf_[ir - m - 1]) * drive_incr_[m];
    double meas = 0.0;
    for (std::size_t m = 0; m < is; ++m)
        meas += (collapse ? 1.0 : kernel_cdf_[ir - m] - kernel_cdf_[ir - m - 1]) * drive_incr_[m];
    if (!collapse) meas += tail_sum(ir);
    return {indep, meas};
}

WhiteNoiseField sample_white_noise(const SpectralGrid& grid, std::uint64_t seed) {
    const std::size_t n = grid.n;
    std::vector<std::complex<double>> spec(n, std::complex<double>(0.0, 0.0));
    const CounterRng rng(seed, CounterRng::kWhiteStream);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t k = 1; k < n / 2; ++k) {
        double g, h;
        rng.gaussians(k, g, h);
        spec[k] = std::complex<double>(g * inv_sqrt2, h * inv_sqrt2);
        spec[n - k] = std::conj(spec[k]);
    }
    {
        // Nyquist mode must be real; unit variance
        double g, h;
        rng.gaussians(n / 2, g, h);
        (void)h;
        spec[n / 2] = std::complex<double>(g, 0.0);
    }
    WhiteNoiseField out{TorusField::from_spectrum(grid, std::move(spec)), -0.5};
    return out;
}

}  // namespace nyv
