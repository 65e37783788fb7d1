#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fractop {

/// Deterministic stream of uniforms. mt19937_64 output is fully specified by
/// the standard, and the 53-bit conversion below avoids the
/// implementation-defined behaviour of std::uniform_real_distribution, so
/// identical seeds give identical doubles on every platform.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Index into a discrete distribution given by cumulative weights
    /// (cum.back() == 1 up to round-off).
    std::size_t pick(const std::vector<double>& cum) {
        const double u = uniform01();
        for (std::size_t i = 0; i + 1 < cum.size(); ++i) {
            if (u < cum[i]) return i;
        }
        return cum.size() - 1;
    }

    std::uint64_t next_u64() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

/// Cheap stateless mixer for deriving independent per-item seeds from a base
/// seed (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t item) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (item + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace fractop
