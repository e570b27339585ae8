#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace heliosolve {

// Counter-based stream RNG used for reproducible noise synthesis.
//
// Generator family "splitmix64:xoshiro256ss:box-muller":
//   stream(seed, index): s = seed + (index+1)*0x9E3779B97F4A7C15, then four
//   successive splitmix64 outputs of s initialize a xoshiro256** state.
//   Uniforms are (x >> 11 + 1) * 2^-53 in (0,1]; normal pairs come from
//   Box-Muller on consecutive uniforms; chi^2(2N) is a sum of 2N squared
//   normals for N <= 1000 and a Marsaglia-Tsang Gamma(N) draw (doubled)
//   above. The family name is recorded in data file headers so other
//   implementations can reproduce arrays bit-exactly.
inline std::uint64_t splitmix64_next(std::uint64_t& s) {
    s += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Xoshiro256ss {
public:
    Xoshiro256ss(std::uint64_t seed, std::uint64_t stream_index) {
        std::uint64_t s = seed + (stream_index + 1) * 0x9E3779B97F4A7C15ull;
        for (auto& w : state_) w = splitmix64_next(s);
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // in (0, 1]
    double next_uniform() {
        return (double((next_u64() >> 11)) + 1.0) * 0x1.0p-53;
    }

    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // chi^2 with 2N degrees of freedom
    double next_chi2_2n(long n) {
        if (n <= 1000) {
            double s = 0.0;
            for (long i = 0; i < 2 * n; ++i) {
                const double z = next_normal();
                s += z * z;
            }
            return s;
        }
        return 2.0 * next_gamma(double(n));
    }

private:
    // Marsaglia-Tsang for shape alpha >= 1, unit scale.
    double next_gamma(double alpha) {
        const double d = alpha - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = next_normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = next_uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    std::array<std::uint64_t, 4> state_{};
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline constexpr const char* kRngFamily = "splitmix64:xoshiro256ss:box-muller";

}  // namespace heliosolve
