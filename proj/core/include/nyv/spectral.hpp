#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "nyv/errors.hpp"

namespace nyv {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform periodic grid x_i = origin + i * period / n.  The origin only
// matters for weight evaluation and interpolation; Fourier analysis is
// translation invariant.  n must be a power of two >= 8.
struct SpectralGrid {
    std::size_t n = 0;
    double period = 1.0;
    double origin = 0.0;

    SpectralGrid() = default;
    SpectralGrid(std::size_t n_, double period_ = 1.0, double origin_ = 0.0);

    double dx() const { return period / static_cast<double>(n); }
    double x(std::size_t i) const { return origin + static_cast<double>(i) * dx(); }
    // Signed mode of spectrum slot i, in {-n/2, ..., n/2 - 1}.
    long long mode(std::size_t i) const {
        const long long half = static_cast<long long>(n / 2);
        const long long k = static_cast<long long>(i);
        return k < half ? k : k - static_cast<long long>(n);
    }
    std::size_t slot(long long k) const {
        return static_cast<std::size_t>(k >= 0 ? k : k + static_cast<long long>(n));
    }
    // Angular frequency of mode k.
    double angular(long long k) const;
    int j_max() const;

    bool operator==(const SpectralGrid& o) const {
        return n == o.n && period == o.period && origin == o.origin;
    }
};

// Real field on a SpectralGrid with a lazily cached spectrum.  spectrum()[i]
// holds the coefficient c_k of mode k = mode(i) in the trigonometric
// interpolant f(x) = sum_k c_k e^{2 pi i k (x - origin)/period}; values are
// the ground truth.  NaN values are rejected at construction.
class TorusField {
public:
    TorusField() = default;
    TorusField(SpectralGrid grid, std::vector<double> values);
    static TorusField from_spectrum(SpectralGrid grid, std::vector<std::complex<double>> spectrum);
    static TorusField zero(SpectralGrid grid);
    static TorusField constant(SpectralGrid grid, double c);

    const SpectralGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<std::complex<double>>& spectrum() const;

    std::size_t size() const { return values_.size(); }

    TorusField& operator+=(const TorusField& o);
    TorusField& operator-=(const TorusField& o);
    TorusField& operator*=(double c);
    TorusField& add_scalar(double c);

    friend TorusField operator+(TorusField a, const TorusField& b) { return a += b; }
    friend TorusField operator-(TorusField a, const TorusField& b) { return a -= b; }
    friend TorusField operator*(double c, TorusField a) { return a *= c; }

private:
    SpectralGrid grid_;
    std::vector<double> values_;
    mutable std::optional<std::vector<std::complex<double>>> spectrum_;
};

// Admissible weight: constant, or w(x) = (1+x^2)^(-lambda/2) with
// comparability exponent lambda' = |lambda|.
struct Weight {
    enum class Kind { constant, polynomial };
    Kind kind = Kind::constant;
    double lambda = 0.0;

    static Weight unit() { return Weight{}; }
    static Weight polynomial(double lambda);

    double lambda_prime() const { return std::abs(lambda); }
    double operator()(double x) const;
    // Comparability constant from the polynomial-weight bound.
    double admissibility_constant() const;
    bool is_unit() const { return kind == Kind::constant; }
};

// Weighted Besov profile: block_norms[j+1] = ||w Delta_j f||_{L^p},
// j = -1 .. j_max, and value = l^q over j of 2^{j kappa} block_norms.
struct BesovProfile {
    double kappa = 0.0;
    double p = kInf;
    double q = kInf;
    std::vector<double> block_norms;  // index 0 corresponds to j = -1
    double value = 0.0;

    int j_max() const { return static_cast<int>(block_norms.size()) - 2; }
};

struct BernsteinReport {
    double ratio = 0.0;        // ||f'||_inf / (a ||f||_inf)
    double lower_ratio = 0.0;  // a ||f||_inf / ||f'||_inf
    double upper_ratio = 0.0;  // same as ratio; bracketed by the lemma constant
};

// Dyadic partition of unity.  chi is identically 1 for r <= 3/4, vanishes for
// r >= 4/3, and phi(r) = chi(r/2) - chi(r) is supported in [3/4, 8/3]; the
// telescoping sum chi(r) + sum_j phi(2^{-j} r) is exactly 1 on the retained
// band.  Arguments are radii in units of 2*pi/period (i.e. |k|).
double chi_multiplier(double r);
double phi_multiplier(double r);
// Multiplier of block j at |k| = absk; j = -1 selects chi.
double block_multiplier(int j, double absk);

// Paley-Littlewood block Delta_j f.  j <= j_max(f) required.
TorusField lp_block(const TorusField& f, int j);

// Weighted L^p norm on the periodic grid (trapezoid rule; p = inf -> max).
double lp_grid_norm(const TorusField& f, double p, const Weight& w);
double sup_norm(const TorusField& f);
double l2_norm(const TorusField& f);

BesovProfile besov_norm(const TorusField& f, double kappa, double p, double q, const Weight& w);

// Least-squares slope diagnostic: negated slope of log2 ||Delta_j f||_inf
// against j over [j_lo, j_hi]; needs at least 3 nonzero blocks in range.
double holder_exponent_estimate(const TorusField& f, int j_lo, int j_hi);

// Pointwise product on a 3n/2 zero-padded grid, truncated back to the band.
TorusField dealiased_product(const TorusField& a, const TorusField& b);

// Spectral derivative of the given order.
TorusField derivative(const TorusField& f, int order);

// Checks the two-sided derivative/norm bracket for an annulus-supported
// field: spectrum must live in a*[3/4, 8/3] (relative tolerance 1e-12).
BernsteinReport bernstein_check(const TorusField& f, double a);

// Defect of the partition of unity at |k| = absk over blocks -1..j_top.
double partition_defect(double absk, int j_top);

}  // namespace nyv
