// Deterministic RNG. <random> distributions are implementation-defined, so all
// sampling that must reproduce bitwise across platforms goes through SplitMix64.
#pragma once

#include <cstdint>
#include <string_view>

namespace xraysim {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_unit() {
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi].
    double next_range(double lo, double hi) {
        return lo + next_unit() * (hi - lo);
    }

    bool next_bool() { return next_unit() < 0.5; }

private:
    std::uint64_t state_;
};

/// FNV-1a over a string, used to fold subject IDs into seeds.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Stable per-item seed from the root seed and the item coordinates.
/// Worker scheduling never enters the derivation, so regeneration is
/// reproducible at any --jobs count.
inline std::uint64_t derive_item_seed(std::uint64_t root_seed, std::string_view subject,
                                      int view_index, int copy_index) {
    SplitMix64 mix(root_seed ^ fnv1a64(subject));
    std::uint64_t a = mix.next_u64();
    SplitMix64 mix2(a ^ (std::uint64_t(std::uint32_t(view_index)) << 32 |
                         std::uint32_t(copy_index)));
    return mix2.next_u64();
}

} // namespace xraysim
