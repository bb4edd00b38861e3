#pragma once

#include <cstdint>
#include <random>

namespace moralecon {

__extension__ using uint128 = unsigned __int128;

/// Seeded random stream used by the simulation.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are not (their algorithms vary between
/// library vendors), so the mappings to doubles and bounded integers are done
/// here:
///   - uniform01(): top 53 bits of one draw, scaled by 2^-53, in [0, 1).
///   - uniform_index(n): Lemire's multiply-shift with rejection, unbiased.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_index(std::uint64_t n) {
        uint128 m = static_cast<uint128>(engine_()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<uint128>(engine_()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace moralecon
