#pragma once

#include <cstdint>

namespace aztec {

// SplitMix64: a counter-mode generator. The n-th output is the finalizer
// applied to seed + n * golden, so streams are cheap to derive and jump.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    static std::uint64_t finalize(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() {
        state_ += kGolden;
        return finalize(state_);
    }

    // uniform in [0,1) with 53 random mantissa bits
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t state() const { return state_; }

    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

private:
    std::uint64_t state_;
};

// Seed of sample `index` in run `run` of an experiment with master seed `master`.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t run, std::uint64_t index) {
    std::uint64_t h = SplitMix64::finalize(master ^ 0x6A09E667F3BCC909ULL);
    h = SplitMix64::finalize(h + run * SplitMix64::kGolden);
    h = SplitMix64::finalize(h ^ (index * 0xD1B54A32D192ED03ULL + 0x2545F4914F6CDD1DULL));
    return h;
}

}  // namespace aztec
