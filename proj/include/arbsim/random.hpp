#pragma once

#include <cstdint>
#include <string_view>

namespace arbsim {

/// Seeded counter-based generator (splitmix64). The std <random> distributions
/// are implementation-defined, so uniform draws are derived here directly from
/// the 64-bit stream to keep traces byte-identical across platforms.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random mantissa bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    /// Independent child stream labelled by a string (e.g. a participant id).
    RandomSource split(std::string_view label) const {
        // FNV-1a over the label folded into the parent state.
        std::uint64_t h = 1469598103934665603ULL;
        for (const char c : label) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
        RandomSource child(state_ ^ h);
        child.next_u64();  // decorrelate from the parent position
        return child;
    }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

/// FNV-1a 64-bit hash, used for config hashes in trace headers.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace arbsim
