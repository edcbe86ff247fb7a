#pragma once

#include <cstdint>
#include <random>

namespace fbis {

// Stateless 64-bit mixer (splitmix64 finalizer). Used to derive independent
// substream seeds from (seed, tag, index) so parallel generation reproduces
// the sequential output exactly.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    return mix64(mix64(seed ^ 0x6a09e667f3bcc908ULL) + mix64(tag) + index);
}

double norm_cdf(double x);      // Phi, absolute error well below 1e-12
double norm_quantile(double p); // inverse Phi (Wichura AS241), p in (0,1)

// Deterministic generator: mt19937_64 with inverse-CDF normals, so draws are
// identical on every platform that implements the standard engine.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform on (0,1), never exactly 0 or 1
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double normal() { return norm_quantile(uniform01()); }

    // uniform integer in [0, bound) by rejection, bound >= 1
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % bound;
    }

private:
    std::mt19937_64 engine_;
};

// Fisher-Yates permutation of {0,...,n-1}
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

} // namespace fbis
