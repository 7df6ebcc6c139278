#include "nyv/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace nyv {

FracHeatOp::FracHeatOp(double alpha_, SpectralGrid grid_) : alpha(alpha_), grid(grid_) {
    if (!(alpha > 0.0) || alpha > 2.0) throw config_error("alpha must lie in (0, 2]");
}

std::vector<double> FracHeatOp::multiplier(double t) const {
    std::vector<double> m(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double lam = std::abs(grid.angular(grid.mode(i)));
        m[i] = std::exp(-std::pow(lam, alpha) * t);
    }
    return m;
}

TorusField heat_apply(const FracHeatOp& op, double t, const TorusField& f) {
    if (t < 0.0) throw config_error("heat_apply requires t >= 0");
    if (!(f.grid() == op.grid)) throw config_error("grid mismatch in heat_apply");
    if (t == 0.0) return f;
    auto spec = f.spectrum();
    const auto m = op.multiplier(t);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= m[i];
    return TorusField::from_spectrum(f.grid(), std::move(spec));
}

SingularVolterraOp::SingularVolterraOp(FracHeatOp heat_, TorusField xi_, double beta_, double vartheta_)
    : heat(std::move(heat_)), xi(std::move(xi_)), beta(beta_), vartheta(vartheta_) {
    if (!(beta > vartheta) || vartheta < 0.0) throw config_error("need beta > vartheta >= 0");
    const double r = rho();
    if (!(r >= 0.0 && r < 1.0)) throw config_error("need 0 <= (beta+vartheta)/2 < 1");
    if (!(xi.grid() == heat.grid)) throw config_error("xi grid mismatch");
}

TorusField singular_apply(const SingularVolterraOp& op, double t, const TorusField& f) {
    if (!(t > 0.0)) throw config_error("singular operator is only evaluated at t > 0");
    return heat_apply(op.heat, t, dealiased_product(op.xi, f));
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

RatioStat make_stat(int id, double th, double thp, const std::vector<double>& ratios) {
    RatioStat s;
    s.estimate_id = id;
    s.theta = th;
    s.theta_prime = thp;
    s.n_samples = ratios.size();
    for (double r : ratios) s.max_ratio = std::max(s.max_ratio, r);
    s.median_ratio = median_of(ratios);
    return s;
}

}  // namespace

HypothesisReport verify_kernel_hypothesis(const SingularVolterraOp& op, double beta,
                                          const std::vector<TorusField>& samples,
                                          const std::vector<double>& t_grid,
                                          const std::vector<double>& theta_grid) {
    if (samples.empty()) throw config_error("verify_kernel_hypothesis: no sample fields");
    for (double t : t_grid)
        if (!(t > 0.0)) throw config_error("verify_kernel_hypothesis: t_grid must lie in (0, T]");

    const double rho = op.rho();
    const Weight w = Weight::unit();
    auto cnorm = [&](const TorusField& f) { return besov_norm(f, beta, kInf, kInf, w).value; };

    std::vector<double> fam1;
    std::map<double, std::vector<double>> fam2;                    // theta -> ratios
    std::map<std::pair<double, double>, std::vector<double>> fam3; // (theta, theta') -> ratios

    for (const auto& u : samples) {
        const double un = cnorm(u);
        if (un == 0.0) {
            fam1.push_back(0.0);
            continue;
        }
        std::map<double, TorusField> su;  // cache of S_x u
        auto S = [&](double x) -> const TorusField& {
            auto it = su.find(x);
            if (it == su.end()) it = su.emplace(x, singular_apply(op, x, u)).first;
            return it->second;
        };

        // (i)  ||S_t u|| t^rho / ||u||
        for (double t : t_grid) fam1.push_back(cnorm(S(t)) * std::pow(t, rho) / un);

        // (ii) ||(S_t - S_s) u|| s^{theta+rho} / ((t-s)^theta ||u||)
        for (double th : theta_grid) {
            auto& bucket = fam2[th];
            for (std::size_t a = 0; a < t_grid.size(); ++a)
                for (std::size_t b = a + 1; b < t_grid.size(); ++b) {
                    const double s = t_grid[a], t = t_grid[b];
                    bucket.push_back(cnorm(S(t) - S(s)) * std::pow(s, th + rho) /
                                     (std::pow(t - s, th) * un));
                }
        }

        // (iii) rectangle increments over s < t < tau' < tau  (tau' == t skipped)
        for (double th : theta_grid)
            for (double thp : theta_grid) {
                auto& bucket = fam3[{th, thp}];
                for (std::size_t a = 0; a < t_grid.size(); ++a)
                    for (std::size_t b = a + 1; b < t_grid.size(); ++b)
                        for (std::size_t c = b + 1; c < t_grid.size(); ++c)
                            for (std::size_t d = c + 1; d < t_grid.size(); ++d) {
                                const double s = t_grid[a], t = t_grid[b];
                                const double taup = t_grid[c], tau = t_grid[d];
                                const TorusField rect =
                                    (S(tau - t) - S(tau - s)) - (S(taup - t) - S(taup - s));
                                const double weight = std::pow(tau - taup, thp) *
                                                      std::pow(t - s, th) *
                                                      std::pow(taup - t, -th - thp - rho);
                                bucket.push_back(cnorm(rect) / (weight * un));
                            }
            }
    }

    HypothesisReport rep;
    rep.stats.push_back(make_stat(1, 0.0, 0.0, fam1));
    rep.pooled[0] = fam1;
    for (const auto& [th, rs] : fam2) {
        rep.stats.push_back(make_stat(2, th, 0.0, rs));
        rep.pooled[1].insert(rep.pooled[1].end(), rs.begin(), rs.end());
    }
    for (const auto& [key, rs] : fam3) {
        rep.stats.push_back(make_stat(3, key.first, key.second, rs));
        rep.pooled[2].insert(rep.pooled[2].end(), rs.begin(), rs.end());
    }
    return rep;
}

}  // namespace nyv
