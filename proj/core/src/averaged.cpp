#include "nyv/averaged.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nyv/fft.hpp"

namespace nyv {

namespace {

// Periodic C^2 cubic spline on a uniform grid.  Second derivatives come from
// the cyclic tridiagonal system solved once per data set (Sherman-Morrison
// on the Thomas algorithm).
class CyclicCubicSpline {
public:
    CyclicCubicSpline(const SpectralGrid& grid, const std::vector<double>& y)
        : grid_(grid), y_(y), m2_(y.size()) {
        const std::size_t n = y.size();
        const double h = grid.dx();
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double ym = y[(i + n - 1) % n], yp = y[(i + 1) % n];
            d[i] = 6.0 * (yp - 2.0 * y[i] + ym) / (h * h);
        }
        solve_cyclic(d);
    }

    // Evaluate at physical coordinate x (periodically wrapped).
    double eval(double x) const {
        const std::size_t n = y_.size();
        const double h = grid_.dx();
        double u = (x - grid_.origin) / h;
        u -= std::floor(u / static_cast<double>(n)) * static_cast<double>(n);
        std::size_t j = static_cast<std::size_t>(u);
        if (j >= n) j = n - 1;
        const double frac = u - static_cast<double>(j);
        const std::size_t jp = (j + 1) % n;
        const double A = 1.0 - frac, B = frac;
        const double h2 = h * h / 6.0;
        return A * y_[j] + B * y_[jp] + ((A * A * A - A) * m2_[j] + (B * B * B - B) * m2_[jp]) * h2;
    }

    // Adds dr * s(x_i + shift) to acc[i] for every grid point; the shared
    // fractional offset makes this a circulant 4-tap stencil.
    void accumulate_shifted(double shift, double dr, std::vector<double>& acc) const {
        const std::size_t n = y_.size();
        const double h = grid_.dx();
        double u = shift / h;
        u -= std::floor(u / static_cast<double>(n)) * static_cast<double>(n);
        std::size_t q = static_cast<std::size_t>(u);
        if (q >= n) q = n - 1;
        const double frac = u - static_cast<double>(q);
        const double A = 1.0 - frac, B = frac;
        const double h2 = h * h / 6.0;
        const double cA = (A * A * A - A) * h2, cB = (B * B * B - B) * h2;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = (i + q) % n;
            const std::size_t jp = (j + 1) % n;
            acc[i] += dr * (A * y_[j] + B * y_[jp] + cA * m2_[j] + cB * m2_[jp]);
        }
    }

private:
    void solve_cyclic(const std::vector<double>& d) {
        const std::size_t n = d.size();
        // system: m2[i-1] + 4 m2[i] + m2[i+1] = d[i], cyclic
        const double b = 4.0, a = 1.0, c = 1.0;
        const double gamma = -b;
        std::vector<double> bb(n, b);
        bb[0] = b - gamma;
        bb[n - 1] = b - a * c / gamma;
        auto thomas = [&](const std::vector<double>& rhs, std::vector<double>& x) {
            std::vector<double> cp(n), dp(n);
            cp[0] = c / bb[0];
            dp[0] = rhs[0] / bb[0];
            for (std::size_t i = 1; i < n; ++i) {
                const double mlt = bb[i] - a * cp[i - 1];
                cp[i] = c / mlt;
                dp[i] = (rhs[i] - a * dp[i - 1]) / mlt;
            }
            x[n - 1] = dp[n - 1];
            for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
        };
        std::vector<double> x(n), z(n), u(n, 0.0), rhs_u(n, 0.0);
        thomas(d, x);
        rhs_u[0] = gamma;
        rhs_u[n - 1] = c;
        thomas(rhs_u, z);
        const double fact = (x[0] + a * x[n - 1] / gamma) /
                            (1.0 + z[0] + a * z[n - 1] / gamma);
        for (std::size_t i = 0; i < n; ++i) m2_[i] = x[i] - fact * z[i];
        (void)u;
    }

    SpectralGrid grid_;
    std::vector<double> y_;
    std::vector<double> m2_;
};

std::vector<double> spectral_derivative_row(const SpectralGrid& g, const std::vector<double>& row,
                                            int order) {
    TorusField f(g, row);
    return derivative(f, order).values();
}

double linreg_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ValueGrid::ValueGrid(double x_max_, std::size_t m_) : x_max(x_max_), m(m_) {
    if (m < 64) throw config_error("value grid needs m >= 64");
    if (!(x_max > 0.0)) throw config_error("x_max must be positive");
}

const std::vector<double>& AveragedField::derivative_row(int order, std::size_t i) const {
    if (order < 1 || order > 3) throw config_error("derivative order must be 1, 2 or 3");
    return deriv_[static_cast<std::size_t>(order - 1)][i];
}

std::size_t AveragedField::index_of_time(double t) const {
    const double dt = t_.size() > 1 ? t_[1] - t_[0] : 1.0;
    const auto i = static_cast<std::size_t>(std::llround((t - t_.front()) / dt));
    if (i >= t_.size() || std::abs(t_[i] - t) > 1e-9 * std::max(t_.back(), 1.0))
        throw config_error("time is not on the averaged-field grid");
    return i;
}

AveragedField compute_averaged_field(const TorusField& g, const SampledPath& omega,
                                     const ValueGrid& vgrid, const std::vector<double>& t_grid) {
    const SpectralGrid vg = vgrid.spectral();
    if (!(g.grid() == vg)) throw config_error("g is not sampled on the value grid");
    if (t_grid.size() < 2) throw config_error("t_grid needs at least 2 points");
    if (t_grid.front() != 0.0) throw config_error("t_grid must start at 0");

    const std::size_t nc = t_grid.size() - 1;
    const std::size_t nf = omega.t.size() - 1;
    if (nf % nc != 0 || nf / nc < 4)
        throw config_error("path grid must refine t_grid with integer ratio >= 4");
    const std::size_t ratio = nf / nc;
    if (std::abs(omega.t.back() - t_grid.back()) > 1e-9 * std::max(t_grid.back(), 1.0))
        throw config_error("path horizon does not match t_grid");

    if (omega.max_abs() + 0.5 * vgrid.x_max > vgrid.x_max) {
        std::ostringstream msg;
        msg << "path range violation: max|omega| = " << omega.max_abs()
            << " exceeds x_max/2 = " << 0.5 * vgrid.x_max;
        throw config_error(msg.str());
    }

    AveragedField A;
    A.vgrid_ = vg;
    A.t_ = t_grid;
    A.table_.assign(t_grid.size(), std::vector<double>(vg.n, 0.0));

    const CyclicCubicSpline spline(vg, g.values());
    const double dr = omega.dt();
    std::vector<double> acc(vg.n, 0.0);
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
        A.table_[i] = acc;
        for (std::size_t mstep = i * ratio; mstep < (i + 1) * ratio; ++mstep)
            spline.accumulate_shifted(omega.values[mstep], dr, acc);
    }
    A.table_.back() = acc;

    for (int d = 1; d <= 3; ++d) {
        auto& dst = A.deriv_[static_cast<std::size_t>(d - 1)];
        dst.resize(t_grid.size());
        for (std::size_t i = 0; i < t_grid.size(); ++i)
            dst[i] = spectral_derivative_row(vg, A.table_[i], d);
    }
    return A;
}

namespace {

TorusField lift_rows(const AveragedField& A, const std::vector<double>& row_t,
                     const std::vector<double>& row_s, const TorusField& theta) {
    const double half = 0.5 * A.x_max();
    double lo = 0.0, hi = 0.0;
    for (double v : theta.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo < -half || hi > half) {
        std::ostringstream msg;
        msg << "lift range violation: theta extremum " << (hi > half ? hi : lo)
            << " outside [-x_max/2, x_max/2] = [" << -half << ", " << half << "]";
        throw config_error(msg.str());
    }
    std::vector<double> diff(row_t.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = row_t[i] - row_s[i];
    const CyclicCubicSpline spline(A.value_grid(), diff);
    std::vector<double> out(theta.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = spline.eval(theta.values()[i]);
    return TorusField(theta.grid(), std::move(out));
}

}  // namespace

TorusField lift_apply(const AveragedField& A, double s, double t, const TorusField& theta) {
    const std::size_t is = A.index_of_time(s), it = A.index_of_time(t);
    if (it < is) throw config_error("lift_apply requires s <= t");
    return lift_rows(A, A.row(it), A.row(is), theta);
}

TorusField lift_gradient(const AveragedField& A, double s, double t, const TorusField& theta) {
    const std::size_t is = A.index_of_time(s), it = A.index_of_time(t);
    if (it < is) throw config_error("lift_gradient requires s <= t");
    return lift_rows(A, A.derivative_row(1, it), A.derivative_row(1, is), theta);
}

namespace {

// Dyadic gap levels of a uniform grid with nc cells: gap = nc/2, nc/4, ...
std::vector<std::size_t> dyadic_gaps(std::size_t nc) {
    std::vector<std::size_t> gaps;
    std::size_t g = nc / 2;
    while (g >= 1) {
        if (nc % g == 0) gaps.push_back(g);
        if (g == 1) break;
        g /= 2;
    }
    return gaps;
}

}  // namespace

TimeRegularityEstimate estimate_time_regularity(const AveragedField& A, double kappa_eval) {
    if (A.n_t() < 64) throw config_error("time regularity estimate needs n_t >= 64");
    const std::size_t nc = A.n_t() - 1;
    const double dt = A.t_grid()[1] - A.t_grid()[0];

    TimeRegularityEstimate est;
    double allzero = 0.0;
    for (std::size_t gap : dyadic_gaps(nc)) {
        double mean = 0.0;
        std::size_t cnt = 0;
        for (std::size_t i = 0; i + gap <= nc; i += gap) {
            TorusField d = A.slice(i + gap) - A.slice(i);
            mean += besov_norm(d, kappa_eval, kInf, kInf, A.weight()).value;
            ++cnt;
        }
        mean /= static_cast<double>(cnt);
        est.scales.push_back(static_cast<double>(gap) * dt);
        est.norms.push_back(mean);
        allzero = std::max(allzero, mean);
    }
    if (allzero == 0.0) throw numeric_error("time regularity estimate: field is identically zero");

    std::size_t drop = 0;
    if (est.scales.size() >= 6)
        drop = 2;
    else if (est.scales.size() >= 4)
        drop = 1;
    std::vector<double> lx, ly;
    for (std::size_t i = drop; i + drop < est.scales.size(); ++i) {
        if (est.norms[i] > 0.0) {
            lx.push_back(std::log(est.scales[i]));
            ly.push_back(std::log(est.norms[i]));
        }
    }
    if (lx.size() < 2) throw numeric_error("time regularity estimate: not enough usable scales");
    est.gamma_hat = linreg_slope(lx, ly);
    return est;
}

SpaceGainEstimate estimate_space_gain(const AveragedField& A, const TorusField& g, int j_lo,
                                      int j_hi) {
    const TorusField last = A.slice(A.n_t() - 1);

    // blocks at rounding level relative to the field's own scale carry no
    // information; if fewer than 3 live blocks remain the estimate fails
    auto live_blocks = [&](const TorusField& f) {
        const double scale = std::max(sup_norm(f), 1e-300);
        std::size_t live = 0;
        for (int j = j_lo; j <= j_hi; ++j)
            if (sup_norm(lp_block(f, j)) > 1e-13 * scale) ++live;
        return live;
    };
    const std::size_t range = static_cast<std::size_t>(j_hi - j_lo + 1);
    const std::size_t live_g = live_blocks(g);
    const std::size_t live_out = live_blocks(last);
    if (live_g < 3 || live_out < 3)
        throw numeric_error("space gain estimate: input or output spectrum is below the "
                            "resolution ceiling in the requested block range");

    SpaceGainEstimate est;
    est.kappa_in = holder_exponent_estimate(g, j_lo, j_hi);
    est.kappa_out = holder_exponent_estimate(last, j_lo, j_hi);
    est.gain = est.kappa_out - est.kappa_in;
    est.saturated = live_out < range || live_g < range;
    return est;
}

TailReport tail_check_blocks(const TorusField& g, const TailCheckParams& prm) {
    if (prm.n_samples < 2000) throw config_error("tail check needs n_samples >= 2000");
    if (!(prm.s >= 0.0 && prm.s < prm.t)) throw config_error("tail check needs 0 <= s < t");

    const TorusField block = lp_block(g, prm.j);
    const double bn = lp_grid_norm(block, prm.p, prm.w);
    if (bn <= 1e-13 * lp_grid_norm(g, prm.p, prm.w))
        throw numeric_error("tail check: block of g vanishes");

    const double gap = prm.t - prm.s;
    const double denom =
        std::pow(gap, 1.0 - 0.5 * prm.nu) * std::pow(2.0, -prm.j * prm.nu / (2.0 * prm.hurst)) * bn;

    const CyclicCubicSpline spline(g.grid(), block.values());
    const SpectralGrid vg = g.grid();

    // fine grid on [0, t]; s must land on it
    SampledPath probe = SampledPath::zero(prm.t, prm.n_path);
    const std::size_t is = probe.index_of(prm.s);
    const std::size_t it = prm.n_path - 1;
    const double dr = probe.dt();

    std::vector<double> ratios(prm.n_samples);
    std::vector<double> raw(prm.n_samples);
    for (std::size_t k = 0; k < prm.n_samples; ++k) {
        std::vector<double> acc(vg.n, 0.0);
        if (prm.path == PathKind::zero) {
            for (std::size_t mstep = is; mstep < it; ++mstep)
                spline.accumulate_shifted(0.0, dr, acc);
        } else {
            const LFSMPath L = sample_lfsm(prm.alpha, prm.hurst, prm.t, prm.n_path,
                                           prm.tail_vmax_factor * prm.t, mix_seed(prm.seed, k));
            for (std::size_t mstep = is; mstep < it; ++mstep)
                spline.accumulate_shifted(L.values()[mstep], dr, acc);
        }
        const double norm = lp_grid_norm(TorusField(vg, std::move(acc)), prm.p, prm.w);
        raw[k] = norm;
        ratios[k] = norm / denom;
    }

    std::sort(ratios.begin(), ratios.end());
    std::vector<double> raw_sorted = raw;
    std::sort(raw_sorted.begin(), raw_sorted.end());

    TailReport rep;
    rep.ratios = ratios;
    auto quant = [&](const std::vector<double>& v, double q) {
        const double pos = q * static_cast<double>(v.size() - 1);
        const std::size_t i0 = static_cast<std::size_t>(pos);
        const std::size_t i1 = std::min(i0 + 1, v.size() - 1);
        const double f = pos - static_cast<double>(i0);
        return (1.0 - f) * v[i0] + f * v[i1];
    };
    for (double q : {0.5, 0.75, 0.9, 0.95, 0.99})
        rep.quantiles.emplace_back(q, quant(ratios, q));
    rep.median_ratio = quant(ratios, 0.5);
    rep.median_unnormalized = quant(raw_sorted, 0.5);

    // upper tail: log of the empirical survival function against x^2
    std::vector<double> xs, ys;
    for (int i = 0; i < 12; ++i) {
        const double q = 0.90 + 0.0085 * i;
        const double x = quant(ratios, q);
        xs.push_back(x * x);
        ys.push_back(std::log(1.0 - q));
    }
    const double slope = linreg_slope(xs, ys);
    rep.slope = slope;
    // r2 and intercept
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    rep.intercept = my - slope * mx;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double fit = rep.intercept + slope * xs[i];
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - my) * (ys[i] - my);
    }
    rep.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return rep;
}

double GrowthTable::operator()(double z) const {
    const double inv0 = 1.0 / w(0.0);
    const double invz = 1.0 / w(std::abs(z));
    return std::max(inv0, invz) * hoelder_norm;
}

namespace {

double holder_norm_over_dyadic(const AveragedField& A, const AveragedField* B, double kappa,
                               double gamma) {
    const std::size_t nc = A.n_t() - 1;
    const double dt = A.t_grid()[1] - A.t_grid()[0];
    double best = 0.0;
    for (std::size_t gap : dyadic_gaps(nc)) {
        for (std::size_t i = 0; i + gap <= nc; i += gap) {
            TorusField d = A.slice(i + gap) - A.slice(i);
            if (B) d -= (B->slice(i + gap) - B->slice(i));
            const double nv = besov_norm(d, kappa, kInf, kInf, A.weight()).value;
            best = std::max(best, nv / std::pow(static_cast<double>(gap) * dt, gamma));
        }
    }
    return best;
}

}  // namespace

GrowthTable growth_table(const AveragedField& A, double kappa, double gamma) {
    GrowthTable g;
    g.w = A.weight();
    g.hoelder_norm = holder_norm_over_dyadic(A, nullptr, kappa, gamma);
    return g;
}

double table_difference_holder_norm(const AveragedField& A, const AveragedField& B, double kappa,
                                    double gamma) {
    if (A.n_t() != B.n_t()) throw config_error("table grids differ");
    return holder_norm_over_dyadic(A, &B, kappa, gamma);
}

TorusField mollify_gaussian(const TorusField& g, double h) {
    if (h == 0.0) return g;
    auto spec = g.spectrum();
    const auto& gr = g.grid();
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double lam = gr.angular(gr.mode(i));
        spec[i] *= std::exp(-0.5 * lam * lam * h * h);
    }
    return TorusField::from_spectrum(gr, std::move(spec));
}

}  // namespace nyv
