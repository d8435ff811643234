#pragma once
// Counter-based stream splitting: every simulated case draws from its own
// generator, derived from (master seed, case index) alone, so results do not
// depend on which thread evaluates which case.

#include <cstdint>
#include <limits>
#include <random>

namespace cfx {

constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// SplitMix64; satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t state) : state_(state) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t case_index) {
    return mix64(mix64(master) ^ (case_index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

/// Per-case random source.
class CaseRng {
public:
    CaseRng(std::uint64_t master, std::uint64_t case_index)
        : engine_(substream_seed(master, case_index)) {}

    double uniform() { return uniform_(engine_); }
    double normal() { return normal_(engine_); }

private:
    SplitMix64 engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace cfx
