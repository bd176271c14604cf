#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace polytrap {

/// splitmix64 step; used to derive independent per-chain seeds from a master
/// seed as splitmix64(master ^ (chain+1)*0x9E3779B97F4A7C15).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t chain_seed(std::uint64_t master, std::uint64_t chain) {
    return splitmix64(master ^ ((chain + 1) * 0x9E3779B97F4A7C15ull));
}

/// Uniform in [0,1) from the top 53 bits; fully specified, engine-portable.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on uniform01 (no library distribution,
/// so streams are reproducible across standard libraries).
class NormalDraw {
  public:
    double operator()(std::mt19937_64& g) {
        if (have_) {
            have_ = false;
            return cached_;
        }
        double u1, u2;
        do { u1 = uniform01(g); } while (u1 == 0.0);
        u2 = uniform01(g);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_ = true;
        return r * std::cos(a);
    }

  private:
    bool have_ = false;
    double cached_ = 0.0;
};

} // namespace polytrap
