#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace nyv {

// Philox2x64-10 counter-based generator (Salmon et al., Random123 family).
// A draw is a pure function of (key, stream, counter), so every sampler in
// the library is reproducible and trivially parallel across streams.
//
// Stream layout (documented contract, relied on by decompose_lfsm and the
// H = 1/alpha collapse):
//   kDriveStream  - increments of the driving Levy process L
//   kTailStream   - increments of the two-sided tail process L~
//   kWhiteStream  - spectral coefficients of spatial white noise
//   kFieldStream  - auxiliary random fields for tests/estimates
class CounterRng {
public:
    static constexpr std::uint64_t kDriveStream = 0;
    static constexpr std::uint64_t kTailStream = 1;
    static constexpr std::uint64_t kWhiteStream = 2;
    static constexpr std::uint64_t kFieldStream = 3;

    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_{seed}, stream_{stream} {}

    struct Pair {
        std::uint64_t a, b;
    };

    // 10-round Philox2x64 block at the given counter.
    Pair block(std::uint64_t counter) const {
        std::uint64_t x0 = counter;
        std::uint64_t x1 = stream_;
        std::uint64_t k = key_;
        for (int r = 0; r < 10; ++r) {
            const Pair p = round(x0, x1, k);
            x0 = p.a;
            x1 = p.b;
            k += kWeyl;
        }
        return {x0, x1};
    }

    // Two independent uniforms in the open interval (0,1).
    Pair raw(std::uint64_t counter) const { return block(counter); }

    static double to_unit(std::uint64_t x) {
        // 53 mantissa bits, offset keeps the value strictly inside (0,1).
        return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
    }

    void uniforms(std::uint64_t counter, double& u1, double& u2) const {
        const Pair p = block(counter);
        u1 = to_unit(p.a);
        u2 = to_unit(p.b);
    }

    // Standard normal pair via Box-Muller; one counter per pair.
    void gaussians(std::uint64_t counter, double& g1, double& g2) const {
        double u1, u2;
        uniforms(counter, u1, u2);
        const double r = std::sqrt(-2.0 * std::log(u1));
        g1 = r * std::cos(2.0 * std::numbers::pi * u2);
        g2 = r * std::sin(2.0 * std::numbers::pi * u2);
    }

private:
    static constexpr std::uint64_t kMul = 0xD2B74407B1CE6E93ull;
    static constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;

    static Pair round(std::uint64_t x0, std::uint64_t x1, std::uint64_t k) {
        const unsigned __int128 prod = static_cast<unsigned __int128>(kMul) * x0;
        const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
        const std::uint64_t lo = static_cast<std::uint64_t>(prod);
        return {hi ^ k ^ x1, lo};
    }

    std::uint64_t key_;
    std::uint64_t stream_;
};

// Stable derivation of per-member seeds for Monte-Carlo ensembles:
// member i of an ensemble keyed by `base` uses seed mix_seed(base, i).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t member) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (member + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace nyv
