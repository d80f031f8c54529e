#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace kslab {

/// xoshiro256++ stream seeded through splitmix64. Self-contained so that
/// sampled values are identical across platforms and standard-library
/// versions; every experiment seed in this project flows through here.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Stable hash combining a base seed with stream labels. Used to derive
    /// independent per-trial streams so parallel and serial runs agree.
    static std::uint64_t derive(std::uint64_t base, std::initializer_list<std::uint64_t> labels);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01();

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi);

    /// Standard normal via Box-Muller; caches the spare deviate.
    double normal();

    /// +1 or -1 with equal probability.
    double rademacher();

    /// Uniformly random s-subset of {1, ..., p}, sorted ascending.
    std::vector<int> sample_subset(int p, int s);

private:
    std::uint64_t state_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace kslab
