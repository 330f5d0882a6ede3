#pragma once

#include <cmath>
#include <cstdint>

namespace pirsim {

// 64-bit finalizer with full avalanche; used for seed derivation and as the
// core of the counter generator.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Folds one value into a derivation chain.
constexpr std::uint64_t mix_combine(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

// Derives independent sub-stream seeds from a parent seed. Streams derived
// with distinct label tuples are decorrelated, so parallel consumers can each
// own a seed without sharing generator state.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a) {
    return mix_combine(mix64(seed), a);
}
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix_combine(derive_seed(seed, a), b);
}
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                    std::uint64_t c) {
    return mix_combine(derive_seed(seed, a, b), c);
}

// Deterministic counter-based generator. Output depends only on the seed, so
// identical seeds give identical streams on every platform and thread count.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1) with 53 random bits.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound); unbiased via rejection. bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t x, r;
        do {
            x = next_u64();
            r = x % bound;
        } while (x - r > std::uint64_t(0) - bound);
        return r;
    }

    // Standard normal via Box-Muller; two uniforms per draw.
    double gaussian() {
        double u1 = 1.0 - next_double();  // (0,1], keeps log finite
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

  private:
    std::uint64_t state_;
};

}  // namespace pirsim
