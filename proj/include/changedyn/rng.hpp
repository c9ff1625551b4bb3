#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace changedyn {

// Counter-based random stream (splitmix64 core). Streams derived from the
// same key tuple produce the same values no matter where or when they are
// consumed, which is what keeps particle updates reproducible under any
// execution order.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    // Derives an independent stream from a run seed and up to three indices,
    // typically (channel, time step, particle slot).
    static RngStream derive(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b = 0, std::uint64_t c = 0) {
        std::uint64_t s = seed;
        s = mix(s + kGamma + a);
        s = mix(s + kGamma + b);
        s = mix(s + kGamma + c);
        return RngStream(s);
    }

    std::uint64_t operator()() {
        state_ += kGamma;
        return mix(state_);
    }

    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~0ull; }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi]; returns lo exactly when the interval is degenerate.
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; consumes exactly two draws.
    double normal() {
        const double u1 = static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

    // Index draw from a probability row summing to ~1.
    std::size_t categorical(std::span<const double> probs) {
        const double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return probs.empty() ? 0 : probs.size() - 1;
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;
    static constexpr double kTwoPi = 6.283185307179586476925286766559;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace changedyn
