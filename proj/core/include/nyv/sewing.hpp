#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "nyv/averaged.hpp"
#include "nyv/semigroup.hpp"
#include "nyv/spectral.hpp"

namespace nyv {

// Path of fields on a uniform time grid with the blow-up-weighted seminorm
// sup_{s<t, zeta in [0,sigma]} ||y_t - y_s|| (s/(t-s))^zeta.
struct SingularHolderPath {
    std::vector<double> t;
    std::vector<TorusField> fields;
    double sigma = 0.3;

    double dt() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
    std::size_t index_of(double time) const;
};

// Norm used inside seminorms and convergence checks: sup by default,
// C^beta block norm on request.
struct NormSpec {
    enum class Kind { sup, besov };
    Kind kind = Kind::sup;
    double beta = 0.0;

    double operator()(const TorusField& f) const;
    static NormSpec supnorm() { return {}; }
    static NormSpec holder(double beta) { return {Kind::besov, beta}; }
};

// The inner sup over zeta is attained at an endpoint since (s/(t-s))^zeta is
// monotone in zeta; s = 0 pairs enter at zeta = 0.
double singular_holder_seminorm(const SingularHolderPath& y, const NormSpec& norm = NormSpec());

// Volterra operator of multiplier type S_t = M(t) o B: a fixed linear map B
// (prepare) followed by a diagonal Fourier multiplier M(t).  Covers the heat
// semigroup, heat o (xi .), and the identity.
class SingularOperator {
public:
    virtual ~SingularOperator() = default;
    virtual double rho() const = 0;
    virtual const SpectralGrid& grid() const = 0;
    virtual std::vector<std::complex<double>> prepare(const TorusField& f) const = 0;
    virtual std::vector<double> multiplier(double t) const = 0;

    TorusField apply(double t, const TorusField& f) const;
};

class HeatXiOperator final : public SingularOperator {
public:
    HeatXiOperator(SingularVolterraOp op) : op_(std::move(op)) {}
    double rho() const override { return op_.rho(); }
    const SpectralGrid& grid() const override { return op_.heat.grid; }
    std::vector<std::complex<double>> prepare(const TorusField& f) const override;
    std::vector<double> multiplier(double t) const override { return op_.heat.multiplier(t); }

private:
    SingularVolterraOp op_;
};

class HeatOperator final : public SingularOperator {
public:
    HeatOperator(FracHeatOp heat, double rho = 0.0) : heat_(std::move(heat)), rho_(rho) {}
    double rho() const override { return rho_; }
    const SpectralGrid& grid() const override { return heat_.grid; }
    std::vector<std::complex<double>> prepare(const TorusField& f) const override {
        return f.spectrum();
    }
    std::vector<double> multiplier(double t) const override { return heat_.multiplier(t); }

private:
    FracHeatOp heat_;
    double rho_;
};

class IdentityOperator final : public SingularOperator {
public:
    explicit IdentityOperator(SpectralGrid g) : grid_(g) {}
    double rho() const override { return 0.0; }
    const SpectralGrid& grid() const override { return grid_; }
    std::vector<std::complex<double>> prepare(const TorusField& f) const override {
        return f.spectrum();
    }
    std::vector<double> multiplier(double) const override {
        return std::vector<double>(grid_.n, 1.0);
    }

private:
    SpectralGrid grid_;
};

// Two-parameter germ X_{s,t}(y) with directional derivative, declared time
// exponent gamma and growth function H.
class NonlinearDriver {
public:
    virtual ~NonlinearDriver() = default;
    virtual TorusField increment(double s, double t, const TorusField& y) const = 0;
    virtual TorusField gradient(double s, double t, const TorusField& y,
                                const TorusField& direction) const = 0;
    virtual double gamma() const = 0;
    virtual double growth(double z) const = 0;
};

// X_{s,t}(y) = (A[t] - A[s])(y(.)), the averaged-field germ.  Additive in
// time by table differencing.
class AveragedFieldDriver final : public NonlinearDriver {
public:
    AveragedFieldDriver(const AveragedField& A, double gamma, double kappa);
    TorusField increment(double s, double t, const TorusField& y) const override;
    TorusField gradient(double s, double t, const TorusField& y,
                        const TorusField& direction) const override;
    double gamma() const override { return gamma_; }
    double growth(double z) const override { return table_(z); }

private:
    const AveragedField* A_;
    double gamma_;
    GrowthTable table_;
};

// Scales or shifts an existing driver in time; used to run a window-local
// clock against an absolute-time germ.
class OffsetDriver final : public NonlinearDriver {
public:
    OffsetDriver(const NonlinearDriver& base, double offset) : base_(&base), offset_(offset) {}
    TorusField increment(double s, double t, const TorusField& y) const override {
        return base_->increment(s + offset_, t + offset_, y);
    }
    TorusField gradient(double s, double t, const TorusField& y,
                        const TorusField& d) const override {
        return base_->gradient(s + offset_, t + offset_, y, d);
    }
    double gamma() const override { return base_->gamma(); }
    double growth(double z) const override { return base_->growth(z); }

private:
    const NonlinearDriver* base_;
    double offset_;
};

struct SewingReport {
    std::vector<int> levels;              // level of I_n
    std::vector<double> increment_norms;  // ||I_n - I_{n-1}||, n >= 1
    std::vector<double> estimate_norms;   // ||I_n||
    bool converged = false;
    int n_star = 0;
    bool snapped = false;           // t was moved to the dyadic sub-grid
    bool exponent_warning = false;  // sigma + gamma <= 1, outside the guarantee
    double fitted_decay(int level_lo, int level_hi) const;
};

struct SewingResult {
    TorusField value;
    SewingReport report;
};

// Exponent gate: gamma > 1/2 and sigma < gamma - rho are hard errors;
// sigma + gamma <= 1 only raises the report warning.
void validate_sewing_exponents(double gamma, double rho, double sigma, bool* warn = nullptr);

// Theta(y)_t over dyadic partitions of [0, t].
SewingResult sewing_integral(const SingularOperator& S, const NonlinearDriver& X,
                             const SingularHolderPath& y, double t, int n_max, double tol);

// Theta_s^t(y)_tau, dyadic partitions of [s, t] with kernel S_{tau-u}.
SewingResult sewing_partial(const SingularOperator& S, const NonlinearDriver& X,
                            const SingularHolderPath& y, double s, double t, double tau, int n_max,
                            double tol);

// Two-parameter rectangle Theta_s^t(y)_{tau', tau}.
SewingResult sewing_rectangle(const SingularOperator& S, const NonlinearDriver& X,
                              const SingularHolderPath& y, double s, double t, double tau_p,
                              double tau, int n_max, double tol);

// || Theta(y)_t - Theta(y)_s - Theta_s^t(y)_t - Theta_0^s(y)_{s,t} ||_inf
double additivity_check(const SingularOperator& S, const NonlinearDriver& X,
                        const SingularHolderPath& y, double s, double t, int n_max, double tol);

// Theta over a single uniform partition of [0, t-index] with n_cells cells.
TorusField sew_uniform(const SingularOperator& S, const NonlinearDriver& X,
                       const SingularHolderPath& y, std::size_t t_index, std::size_t n_cells);

// Theta(y) at every grid time of y, one uniform finest-grid partition per
// time; summands of several (S, X) pairs are added.  Left-to-right
// accumulation order is fixed for reproducibility.
struct SewingPair {
    const SingularOperator* S;
    const NonlinearDriver* X;
};

std::vector<TorusField> sew_on_grid(const std::vector<SewingPair>& pairs,
                                    const SingularHolderPath& y);

struct StabilityBoundReport {
    double measured = 0.0;  // [Theta1(y1) - Theta2(y2)]_sigma
    double bound = 0.0;     // right side with measured growth tables
    double ratio = 0.0;
};

struct StabilityDiffResult {
    TorusField diff;
    StabilityBoundReport report;
};

// growth_diff supplies H_{X1-X2}; the drivers supply H.
StabilityDiffResult stability_diff(const SingularOperator& S, const NonlinearDriver& X1,
                                   const NonlinearDriver& X2, const SingularHolderPath& y1,
                                   const SingularHolderPath& y2, double t,
                                   const std::function<double(double)>& growth_diff, int n_max,
                                   double tol);

}  // namespace nyv
