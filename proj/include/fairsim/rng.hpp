#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fairsim {

/// Seeded random stream with hand-rolled uniform helpers. std::mt19937_64 is
/// fully specified by the standard and the helpers avoid the
/// implementation-defined std distributions, so a seed pins the exact draw
/// sequence on every platform.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0,1) with 53 random bits.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0,n). Multiply-shift bounding; bias is negligible for the
    // list sizes used here.
    std::size_t next_below(std::size_t n) {
        return static_cast<std::size_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[next_below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent seed per (fold, cell) task so parallel runs stay reproducible.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t fold, std::uint64_t cell) {
    return splitmix64(splitmix64(base ^ 0xA5A5A5A55A5A5A5AULL) + 0x100000001B3ULL * fold + cell);
}

}  // namespace fairsim
