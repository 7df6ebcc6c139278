#include "nyv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nyv/fft.hpp"

namespace nyv {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int ilog2(std::size_t n) {
    int j = 0;
    while ((std::size_t{1} << j) < n) ++j;
    return j;
}

void check_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (std::isnan(x)) throw numeric_error("NaN in field values");
    }
}

}  // namespace

SpectralGrid::SpectralGrid(std::size_t n_, double period_, double origin_)
    : n(n_), period(period_), origin(origin_) {
    if (n < 8 || !is_pow2(n)) throw config_error("grid size must be a power of two >= 8");
    if (!(period > 0.0)) throw config_error("grid period must be positive");
}

double SpectralGrid::angular(long long k) const {
    return 2.0 * kPi * static_cast<double>(k) / period;
}

int SpectralGrid::j_max() const { return ilog2(n) - 1; }

TorusField::TorusField(SpectralGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n) throw config_error("value count does not match grid");
    check_finite(values_);
}

TorusField TorusField::from_spectrum(SpectralGrid grid, std::vector<std::complex<double>> spectrum) {
    if (spectrum.size() != grid.n) throw config_error("spectrum size does not match grid");
    std::vector<std::complex<double>> work;
    fft::inverse(spectrum, work);
    TorusField f;
    f.grid_ = grid;
    f.values_.resize(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) f.values_[i] = work[i].real();
    check_finite(f.values_);
    f.spectrum_ = std::move(spectrum);
    return f;
}

TorusField TorusField::zero(SpectralGrid grid) {
    return TorusField(grid, std::vector<double>(grid.n, 0.0));
}

TorusField TorusField::constant(SpectralGrid grid, double c) {
    return TorusField(grid, std::vector<double>(grid.n, c));
}

const std::vector<std::complex<double>>& TorusField::spectrum() const {
    if (!spectrum_) {
        std::vector<std::complex<double>> in(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) in[i] = values_[i];
        std::vector<std::complex<double>> out;
        fft::forward(in, out);
        const double inv_n = 1.0 / static_cast<double>(values_.size());
        for (auto& c : out) c *= inv_n;
        spectrum_ = std::move(out);
    }
    return *spectrum_;
}

TorusField& TorusField::operator+=(const TorusField& o) {
    if (!(grid_ == o.grid_)) throw config_error("grid mismatch in field addition");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    spectrum_.reset();
    return *this;
}

TorusField& TorusField::operator-=(const TorusField& o) {
    if (!(grid_ == o.grid_)) throw config_error("grid mismatch in field subtraction");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    spectrum_.reset();
    return *this;
}

TorusField& TorusField::operator*=(double c) {
    for (auto& v : values_) v *= c;
    spectrum_.reset();
    return *this;
}

TorusField& TorusField::add_scalar(double c) {
    for (auto& v : values_) v += c;
    spectrum_.reset();
    return *this;
}

Weight Weight::polynomial(double lambda) {
    Weight w;
    w.kind = Kind::polynomial;
    w.lambda = lambda;
    return w;
}

double Weight::operator()(double x) const {
    if (kind == Kind::constant) return 1.0;
    return std::pow(1.0 + x * x, -lambda / 2.0);
}

double Weight::admissibility_constant() const {
    if (kind == Kind::constant) return 1.0;
    return std::pow(2.0, 3.0 * std::abs(lambda) / 4.0);
}

namespace {

// Smooth transition 1 -> 0 on [a, b] built from the standard C-infinity bump.
double smooth_step_down(double r, double a, double b) {
    if (r <= a) return 1.0;
    if (r >= b) return 0.0;
    const double u = (r - a) / (b - a);
    const double ha = std::exp(-1.0 / (1.0 - u));
    const double hb = std::exp(-1.0 / u);
    return ha / (ha + hb);
}

constexpr double kChiOne = 0.75;       // chi == 1 on [0, 3/4]
constexpr double kChiSupp = 4.0 / 3.0; // chi == 0 beyond 4/3

}  // namespace

double chi_multiplier(double r) { return smooth_step_down(std::abs(r), kChiOne, kChiSupp); }

double phi_multiplier(double r) {
    const double ar = std::abs(r);
    return chi_multiplier(0.5 * ar) - chi_multiplier(ar);
}

double block_multiplier(int j, double absk) {
    if (j < -1) throw config_error("block index below -1");
    if (j == -1) return chi_multiplier(absk);
    return phi_multiplier(std::ldexp(absk, -j));
}

double partition_defect(double absk, int j_top) {
    double s = chi_multiplier(absk);
    for (int j = 0; j <= j_top; ++j) s += block_multiplier(j, absk);
    return std::abs(s - 1.0);
}

TorusField lp_block(const TorusField& f, int j) {
    const auto& g = f.grid();
    if (j > g.j_max()) throw config_error("block index beyond the Nyquist band");
    if (j < -1) throw config_error("block index below -1");
    auto spec = f.spectrum();
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double absk = std::abs(static_cast<double>(g.mode(i)));
        spec[i] *= block_multiplier(j, absk);
    }
    return TorusField::from_spectrum(g, std::move(spec));
}

double lp_grid_norm(const TorusField& f, double p, const Weight& w) {
    const auto& g = f.grid();
    const auto& v = f.values();
    if (p == kInf) {
        double m = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) m = std::max(m, std::abs(w(g.x(i)) * v[i]));
        return m;
    }
    if (!(p >= 1.0)) throw config_error("L^p exponent must be in [1, inf]");
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += std::pow(std::abs(w(g.x(i)) * v[i]), p);
    return std::pow(g.dx() * s, 1.0 / p);
}

double sup_norm(const TorusField& f) { return lp_grid_norm(f, kInf, Weight::unit()); }

double l2_norm(const TorusField& f) { return lp_grid_norm(f, 2.0, Weight::unit()); }

BesovProfile besov_norm(const TorusField& f, double kappa, double p, double q, const Weight& w) {
    BesovProfile prof;
    prof.kappa = kappa;
    prof.p = p;
    prof.q = q;
    const int jm = f.grid().j_max();
    prof.block_norms.resize(static_cast<std::size_t>(jm) + 2);
    for (int j = -1; j <= jm; ++j) {
        prof.block_norms[static_cast<std::size_t>(j + 1)] = lp_grid_norm(lp_block(f, j), p, w);
    }
    if (q == kInf) {
        double m = 0.0;
        for (int j = -1; j <= jm; ++j)
            m = std::max(m, std::pow(2.0, kappa * j) * prof.block_norms[static_cast<std::size_t>(j + 1)]);
        prof.value = m;
    } else {
        if (!(q >= 1.0)) throw config_error("l^q exponent must be in [1, inf]");
        double s = 0.0;
        for (int j = -1; j <= jm; ++j)
            s += std::pow(std::pow(2.0, kappa * j) * prof.block_norms[static_cast<std::size_t>(j + 1)], q);
        prof.value = std::pow(s, 1.0 / q);
    }
    return prof;
}

double holder_exponent_estimate(const TorusField& f, int j_lo, int j_hi) {
    const int jm = f.grid().j_max();
    if (!(j_lo < j_hi) || j_hi > jm || j_lo < -1) throw config_error("invalid block range");
    std::vector<double> js, logs;
    double bmax = 0.0;
    std::vector<double> norms;
    for (int j = j_lo; j <= j_hi; ++j) {
        norms.push_back(lp_grid_norm(lp_block(f, j), kInf, Weight::unit()));
        bmax = std::max(bmax, norms.back());
    }
    if (bmax == 0.0) throw numeric_error("holder estimate: all blocks vanish in range");
    for (int j = j_lo; j <= j_hi; ++j) {
        const double b = norms[static_cast<std::size_t>(j - j_lo)];
        if (b > 1e-14 * bmax) {
            js.push_back(j);
            logs.push_back(std::log2(b));
        }
    }
    if (js.size() < 3) throw numeric_error("holder estimate: fewer than 3 nonzero blocks");
    // least squares slope
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(js.size());
    for (std::size_t i = 0; i < js.size(); ++i) {
        sx += js[i];
        sy += logs[i];
        sxx += js[i] * js[i];
        sxy += js[i] * logs[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

TorusField dealiased_product(const TorusField& a, const TorusField& b) {
    const auto& g = a.grid();
    if (!(g == b.grid())) throw config_error("grid mismatch in product");
    const std::size_t n = g.n;
    const std::size_t m = 3 * n / 2;
    const auto& sa = a.spectrum();
    const auto& sb = b.spectrum();

    auto pad = [&](const std::vector<std::complex<double>>& s) {
        std::vector<std::complex<double>> out(m, std::complex<double>(0.0, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            const long long k = g.mode(i);
            const std::size_t slot = static_cast<std::size_t>(k >= 0 ? k : k + static_cast<long long>(m));
            out[slot] = s[i];
        }
        return out;
    };

    std::vector<std::complex<double>> wa, wb;
    fft::inverse(pad(sa), wa);
    fft::inverse(pad(sb), wb);
    for (std::size_t i = 0; i < m; ++i) wa[i] *= wb[i];
    std::vector<std::complex<double>> prod_spec;
    fft::forward(wa, prod_spec);
    const double inv_m = 1.0 / static_cast<double>(m);

    std::vector<std::complex<double>> trunc(n);
    for (std::size_t i = 0; i < n; ++i) {
        const long long k = g.mode(i);
        const std::size_t slot = static_cast<std::size_t>(k >= 0 ? k : k + static_cast<long long>(m));
        trunc[i] = prod_spec[slot] * inv_m;
    }
    return TorusField::from_spectrum(g, std::move(trunc));
}

TorusField derivative(const TorusField& f, int order) {
    if (order < 0) throw config_error("derivative order must be nonnegative");
    const auto& g = f.grid();
    auto spec = f.spectrum();
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const std::complex<double> il(0.0, g.angular(g.mode(i)));
        std::complex<double> m(1.0, 0.0);
        for (int d = 0; d < order; ++d) m *= il;
        spec[i] *= m;
    }
    return TorusField::from_spectrum(g, std::move(spec));
}

BernsteinReport bernstein_check(const TorusField& f, double a) {
    const auto& g = f.grid();
    const auto& spec = f.spectrum();
    double cmax = 0.0;
    for (const auto& c : spec) cmax = std::max(cmax, std::abs(c));
    if (cmax == 0.0) throw config_error("bernstein check: empty spectral support");
    const double lo = a * kChiOne, hi = a * 8.0 / 3.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (std::abs(spec[i]) > 1e-12 * cmax) {
            const double absk = std::abs(static_cast<double>(g.mode(i)));
            if (absk < lo || absk > hi)
                throw config_error("bernstein check: spectrum leaves the annulus a*[3/4, 8/3]");
        }
    }
    const double fn = sup_norm(f);
    const double dn = sup_norm(derivative(f, 1));
    BernsteinReport r;
    r.ratio = dn / (a * fn);
    r.upper_ratio = r.ratio;
    r.lower_ratio = a * fn / dn;
    return r;
}

}  // namespace nyv
