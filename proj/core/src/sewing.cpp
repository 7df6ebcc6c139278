#include "nyv/sewing.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace nyv {

std::size_t SingularHolderPath::index_of(double time) const {
    const double step = dt();
    const double span = std::max(std::abs(t.back() - t.front()), 1.0);
    const auto i = static_cast<std::size_t>(std::llround((time - t.front()) / step));
    if (i >= t.size() || std::abs(t[i] - time) > 1e-9 * span)
        throw config_error("time is not on the path grid");
    return i;
}

double NormSpec::operator()(const TorusField& f) const {
    if (kind == Kind::sup) return sup_norm(f);
    return besov_norm(f, beta, kInf, kInf, Weight::unit()).value;
}

double singular_holder_seminorm(const SingularHolderPath& y, const NormSpec& norm) {
    if (y.t.size() < 2) throw config_error("seminorm needs at least 2 time points");
    double best = 0.0;
    for (std::size_t a = 0; a < y.t.size(); ++a) {
        for (std::size_t b = a + 1; b < y.t.size(); ++b) {
            const double s = y.t[a], t = y.t[b];
            const double nv = norm(y.fields[b] - y.fields[a]);
            double w = 1.0;
            if (s > 0.0 && s >= t - s) w = std::pow(s / (t - s), y.sigma);
            best = std::max(best, nv * w);
        }
    }
    return best;
}

TorusField SingularOperator::apply(double t, const TorusField& f) const {
    auto spec = prepare(f);
    const auto m = multiplier(t);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= m[i];
    return TorusField::from_spectrum(grid(), std::move(spec));
}

std::vector<std::complex<double>> HeatXiOperator::prepare(const TorusField& f) const {
    return dealiased_product(op_.xi, f).spectrum();
}

AveragedFieldDriver::AveragedFieldDriver(const AveragedField& A, double gamma, double kappa)
    : A_(&A), gamma_(gamma), table_(growth_table(A, kappa, gamma)) {}

TorusField AveragedFieldDriver::increment(double s, double t, const TorusField& y) const {
    return lift_apply(*A_, s, t, y);
}

TorusField AveragedFieldDriver::gradient(double s, double t, const TorusField& y,
                                         const TorusField& direction) const {
    TorusField g = lift_gradient(*A_, s, t, y);
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = g.values()[i] * direction.values()[i];
    return TorusField(g.grid(), std::move(out));
}

void validate_sewing_exponents(double gamma, double rho, double sigma, bool* warn) {
    if (!(gamma > 0.5)) throw config_error("sewing requires gamma > 1/2");
    if (!(sigma < gamma - rho)) throw config_error("sewing requires sigma < gamma - rho");
    if (!(sigma > 0.0)) throw config_error("sewing requires sigma > 0");
    if (warn) *warn = (sigma + gamma <= 1.0);
}

double SewingReport::fitted_decay(int level_lo, int level_hi) const {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < increment_norms.size(); ++i) {
        const int lev = levels.size() > i + 1 ? levels[i + 1] : static_cast<int>(i) + 1;
        if (lev < level_lo || lev > level_hi) continue;
        if (increment_norms[i] > 0.0) {
            xs.push_back(lev);
            ys.push_back(std::log2(increment_norms[i]));
        }
    }
    if (xs.size() < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

// Shared dyadic engine.  Sums S-kernel weighted germ increments over dyadic
// partitions of [s_idx, t_idx]; the kernel is multiplier(tau - u) or the
// difference multiplier(tau - u) - multiplier(tau_p - u).
struct KernelSpec {
    double tau = 0.0;
    bool rectangle = false;
    double tau_p = 0.0;
};

TorusField sum_level(const SingularOperator& S, const NonlinearDriver& X,
                     const SingularHolderPath& y, std::size_t s_idx, std::size_t t_idx,
                     const KernelSpec& ker, std::size_t cells) {
    const std::size_t span = t_idx - s_idx;
    const std::size_t stride = span / cells;
    const SpectralGrid& g = S.grid();
    std::vector<std::complex<double>> acc(g.n, std::complex<double>(0.0, 0.0));
    for (std::size_t c = 0; c < cells; ++c) {
        const std::size_t u_idx = s_idx + c * stride;
        const std::size_t v_idx = u_idx + stride;
        const double u = y.t[u_idx], v = y.t[v_idx];
        const auto prep = S.prepare(X.increment(u, v, y.fields[u_idx]));
        const auto m1 = S.multiplier(ker.tau - u);
        if (ker.rectangle) {
            const auto m2 = S.multiplier(ker.tau_p - u);
            for (std::size_t i = 0; i < g.n; ++i) acc[i] += (m1[i] - m2[i]) * prep[i];
        } else {
            for (std::size_t i = 0; i < g.n; ++i) acc[i] += m1[i] * prep[i];
        }
    }
    return TorusField::from_spectrum(g, std::move(acc));
}

SewingResult dyadic_sew(const SingularOperator& S, const NonlinearDriver& X,
                        const SingularHolderPath& y, std::size_t s_idx, std::size_t t_idx,
                        const KernelSpec& ker, int n_max, double tol) {
    SewingResult res{TorusField::zero(S.grid()), {}};
    bool warn = false;
    validate_sewing_exponents(X.gamma(), S.rho(), y.sigma, &warn);
    res.report.exponent_warning = warn;

    if (ker.rectangle && ker.tau == ker.tau_p) {
        res.report.converged = true;
        res.report.levels.push_back(0);
        res.report.estimate_norms.push_back(0.0);
        return res;
    }

    const std::size_t span = t_idx - s_idx;
    int avail = 0;
    while ((std::size_t{1} << (avail + 1)) <= span && span % (std::size_t{1} << (avail + 1)) == 0)
        ++avail;
    const int top = std::min(n_max, avail);

    TorusField prev = sum_level(S, X, y, s_idx, t_idx, ker, 1);
    res.report.levels.push_back(0);
    res.report.estimate_norms.push_back(sup_norm(prev));
    res.value = prev;
    for (int n = 1; n <= top; ++n) {
        TorusField cur = sum_level(S, X, y, s_idx, t_idx, ker, std::size_t{1} << n);
        const double inc = sup_norm(cur - prev);
        res.report.levels.push_back(n);
        res.report.increment_norms.push_back(inc);
        res.report.estimate_norms.push_back(sup_norm(cur));
        if (inc < tol && !res.report.converged) {
            res.report.converged = true;
            res.report.n_star = n - 1;
            res.value = prev;
            return res;
        }
        prev = std::move(cur);
    }
    res.value = prev;
    res.report.n_star = top;
    // exhausted levels; converged only if the germ contributed nothing
    if (!res.report.converged && res.report.increment_norms.empty()) res.report.converged = true;
    return res;
}

std::size_t snapped_index(const SingularHolderPath& y, double t, bool* snapped) {
    // snap t to the nearest grid index; the dyadic depth available at that
    // index (its trailing-zero count) caps the refinement levels
    const std::size_t cells = y.t.size() - 1;
    const double step = y.dt();
    const double raw = (t - y.t.front()) / step;
    std::size_t i = static_cast<std::size_t>(std::llround(std::max(raw, 1.0)));
    i = std::min(std::max<std::size_t>(i, 1), cells);
    if (snapped) *snapped = std::abs(static_cast<double>(i) - raw) > 1e-9;
    return i;
}

}  // namespace

SewingResult sewing_integral(const SingularOperator& S, const NonlinearDriver& X,
                             const SingularHolderPath& y, double t, int n_max, double tol) {
    bool snapped = false;
    const std::size_t t_idx = snapped_index(y, t, &snapped);
    KernelSpec ker;
    ker.tau = y.t[t_idx];
    SewingResult r = dyadic_sew(S, X, y, 0, t_idx, ker, n_max, tol);
    r.report.snapped = snapped;
    return r;
}

SewingResult sewing_partial(const SingularOperator& S, const NonlinearDriver& X,
                            const SingularHolderPath& y, double s, double t, double tau, int n_max,
                            double tol) {
    const std::size_t s_idx = y.index_of(s), t_idx = y.index_of(t);
    if (!(s_idx < t_idx)) throw config_error("sewing_partial requires s < t");
    if (tau < t) throw config_error("sewing_partial requires tau >= t");
    KernelSpec ker;
    ker.tau = tau;
    return dyadic_sew(S, X, y, s_idx, t_idx, ker, n_max, tol);
}

SewingResult sewing_rectangle(const SingularOperator& S, const NonlinearDriver& X,
                              const SingularHolderPath& y, double s, double t, double tau_p,
                              double tau, int n_max, double tol) {
    if (!(s <= t && t <= tau_p && tau_p <= tau)) throw config_error("need s <= t <= tau' <= tau");
    const std::size_t s_idx = y.index_of(s), t_idx = y.index_of(t);
    if (s_idx == t_idx) {
        SewingResult r{TorusField::zero(S.grid()), {}};
        r.report.converged = true;
        return r;
    }
    KernelSpec ker;
    ker.tau = tau;
    ker.rectangle = true;
    ker.tau_p = tau_p;
    return dyadic_sew(S, X, y, s_idx, t_idx, ker, n_max, tol);
}

double additivity_check(const SingularOperator& S, const NonlinearDriver& X,
                        const SingularHolderPath& y, double s, double t, int n_max, double tol) {
    if (!(s > 0.0 && s < t)) throw config_error("additivity check needs 0 < s < t");
    const TorusField theta_t = sewing_integral(S, X, y, t, n_max, tol).value;
    const TorusField theta_s = sewing_integral(S, X, y, s, n_max, tol).value;
    const TorusField tail = sewing_partial(S, X, y, s, t, t, n_max, tol).value;
    const TorusField rect = sewing_rectangle(S, X, y, 0.0, s, s, t, n_max, tol).value;
    return sup_norm(theta_t - theta_s - tail - rect);
}

TorusField sew_uniform(const SingularOperator& S, const NonlinearDriver& X,
                       const SingularHolderPath& y, std::size_t t_index, std::size_t n_cells) {
    if (t_index == 0 || t_index >= y.t.size()) throw config_error("bad t_index");
    if (n_cells == 0 || t_index % n_cells != 0)
        throw config_error("n_cells must divide the index of t");
    KernelSpec ker;
    ker.tau = y.t[t_index];
    return sum_level(S, X, y, 0, t_index, ker, n_cells);
}

std::vector<TorusField> sew_on_grid(const std::vector<SewingPair>& pairs,
                                    const SingularHolderPath& y) {
    if (pairs.empty()) throw config_error("sew_on_grid: no (S, X) pairs");
    const SpectralGrid& g = pairs.front().S->grid();
    const std::size_t n = y.t.size();
    const double step = y.dt();

    std::vector<TorusField> out;
    out.reserve(n);
    out.push_back(TorusField::zero(g));

    // prepared spectra per pair and cell, and lag-indexed multiplier rows
    std::vector<std::vector<std::vector<std::complex<double>>>> prep(pairs.size());
    std::vector<std::vector<std::vector<double>>> lag_mult(pairs.size());
    for (std::size_t pidx = 0; pidx < pairs.size(); ++pidx) {
        prep[pidx].reserve(n - 1);
        lag_mult[pidx].resize(n);
    }

    std::vector<std::complex<double>> acc(g.n);
    for (std::size_t i = 1; i < n; ++i) {
        // new cell [i-1, i]
        for (std::size_t pidx = 0; pidx < pairs.size(); ++pidx) {
            const auto& pr = pairs[pidx];
            prep[pidx].push_back(
                pr.S->prepare(pr.X->increment(y.t[i - 1], y.t[i], y.fields[i - 1])));
        }
        std::fill(acc.begin(), acc.end(), std::complex<double>(0.0, 0.0));
        for (std::size_t pidx = 0; pidx < pairs.size(); ++pidx) {
            for (std::size_t m = 0; m < i; ++m) {
                const std::size_t lag = i - m;
                auto& row = lag_mult[pidx][lag];
                if (row.empty()) row = pairs[pidx].S->multiplier(static_cast<double>(lag) * step);
                const auto& pm = prep[pidx][m];
                for (std::size_t k = 0; k < g.n; ++k) acc[k] += row[k] * pm[k];
            }
        }
        out.push_back(TorusField::from_spectrum(g, acc));
    }
    return out;
}

StabilityDiffResult stability_diff(const SingularOperator& S, const NonlinearDriver& X1,
                                   const NonlinearDriver& X2, const SingularHolderPath& y1,
                                   const SingularHolderPath& y2, double t,
                                   const std::function<double(double)>& growth_diff, int n_max,
                                   double tol) {
    if (y1.t.size() != y2.t.size()) throw config_error("stability_diff: paths on different grids");
    const TorusField th1 = sewing_integral(S, X1, y1, t, n_max, tol).value;
    const TorusField th2 = sewing_integral(S, X2, y2, t, n_max, tol).value;

    StabilityDiffResult res{th1 - th2, {}};

    // seminorm of the difference path over the grid
    std::vector<TorusField> p1 = sew_on_grid({{&S, &X1}}, y1);
    std::vector<TorusField> p2 = sew_on_grid({{&S, &X2}}, y2);
    SingularHolderPath diff;
    diff.t = y1.t;
    diff.sigma = y1.sigma;
    for (std::size_t i = 0; i < p1.size(); ++i) diff.fields.push_back(p1[i] - p2[i]);
    res.report.measured = singular_holder_seminorm(diff);

    const NormSpec sup = NormSpec::supnorm();
    double ymax = 0.0;
    for (const auto& f : y1.fields) ymax = std::max(ymax, sup(f));
    for (const auto& f : y2.fields) ymax = std::max(ymax, sup(f));
    const double s1 = singular_holder_seminorm(y1);
    const double s2 = singular_holder_seminorm(y2);
    SingularHolderPath ydiff;
    ydiff.t = y1.t;
    ydiff.sigma = y1.sigma;
    for (std::size_t i = 0; i < y1.fields.size(); ++i)
        ydiff.fields.push_back(y1.fields[i] - y2.fields[i]);
    const double sdiff = singular_holder_seminorm(ydiff);
    const double y0diff = sup(y1.fields[0] - y2.fields[0]);

    const double eps = X1.gamma() - S.rho() - y1.sigma;
    const double horizon = y1.t.back();
    const double H1 = std::max(X1.growth(ymax), X2.growth(ymax));
    const double Hd = growth_diff ? growth_diff(ymax) : 0.0;
    res.report.bound = (H1 * (s1 + s2) * (y0diff + sdiff) + Hd * std::max(s1, s2)) *
                       std::pow(horizon, eps);
    res.report.ratio = res.report.bound > 0.0 ? res.report.measured / res.report.bound : 0.0;
    return res;
}

}  // namespace nyv
