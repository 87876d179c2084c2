#pragma once

#include <cmath>
#include <cstdint>

namespace fpvault {

// Deterministic PRNG with a stable cross-platform sequence (splitmix64).
// std::mt19937 + std::*_distribution would tie results to the standard
// library implementation, which breaks reproducibility guarantees, so all
// randomness in the library flows through this generator.
class Rng {
public:
    explicit Rng(std::uint64_t seed)
        : state_(seed)
    {
    }

    // Derives an independent stream from (seed, stream). Used to give every
    // trial / draw / worker its own generator so that results do not depend
    // on scheduling or evaluation order.
    static Rng fork(std::uint64_t seed, std::uint64_t stream)
    {
        Rng mixer(seed ^ (0x9E3779B97F4A7C15ull * (stream + 1)));
        std::uint64_t derived = mixer.nextU64();
        return Rng(derived);
    }

    std::uint64_t nextU64()
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform on [0, bound), unbiased via rejection. bound must be > 0.
    std::uint32_t below(std::uint32_t bound)
    {
        std::uint64_t threshold = (~std::uint64_t(0) - bound + 1) % bound;
        for (;;) {
            std::uint64_t r = nextU64();
            if (r >= threshold)
                return static_cast<std::uint32_t>(r % bound);
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unitReal()
    {
        return static_cast<double>(nextU64() >> 11) * 0x1.0p-53;
    }

    // Gaussian with mean 0 via Box-Muller. Computes a fresh pair every call
    // so the consumed stream length is call-count independent of history.
    double gaussian(double sigma)
    {
        double u1 = unitReal();
        while (u1 <= 0.0)
            u1 = unitReal();
        double u2 = unitReal();
        double r = std::sqrt(-2.0 * std::log(u1));
        return sigma * r * std::cos(6.28318530717958647692 * u2);
    }

private:
    std::uint64_t state_;
};

} // namespace fpvault
