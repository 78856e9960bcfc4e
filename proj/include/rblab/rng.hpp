#pragma once

#include <cstdint>

namespace rblab {

// Counter-based pseudo-random generator built on the SplitMix64 finalizer.
//
// Every draw is hash(key, counter++); there is no hidden state beyond the
// counter, and split(label) derives an independent keyed stream. Constraint i
// can therefore be generated from split(i) in parallel with output identical
// to the serial order. The mapping is fixed: changing it changes every
// generated instance, so treat it as part of the file-format contract.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(mix(seed ^ kRootSalt)) {}

    // Independent stream derived from this one; deterministic in (key, label).
    Rng split(std::uint64_t label) const {
        return Rng(key_, mix(label ^ kSplitSalt));
    }

    std::uint64_t next() { return mix(key_ + kGamma * ++counter_); }

    // Uniform in [0, bound), bound >= 1. Rejection from the top, no modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t x = next();
            if (x >= threshold) return x % bound;
        }
    }

    // Uniform in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    Rng(std::uint64_t parent_key, std::uint64_t mixed_label)
        : key_(mix(parent_key ^ mixed_label)) {}

    static constexpr std::uint64_t kRootSalt = 0x8f462907a7f0561dULL;
    static constexpr std::uint64_t kSplitSalt = 0xd1342543de82ef95ULL;
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace rblab
