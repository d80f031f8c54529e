#include "kslab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

namespace kslab {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
}

std::uint64_t Rng::derive(std::uint64_t base, std::initializer_list<std::uint64_t> labels) {
    std::uint64_t s = base;
    std::uint64_t h = splitmix64(s);
    for (std::uint64_t label : labels) {
        s = h ^ (label + 0x9E3779B97F4A7C15ULL);
        h = splitmix64(s);
    }
    return h;
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int lo, int hi) {
    if (lo > hi) throw std::invalid_argument("Rng::uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    // Rejection sampling for an unbiased draw.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t u;
    do {
        u = next_u64();
    } while (u >= limit);
    return lo + static_cast<int>(u % span);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform01();
    const double u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

double Rng::rademacher() {
    return (next_u64() & 1ULL) ? 1.0 : -1.0;
}

std::vector<int> Rng::sample_subset(int p, int s) {
    if (s < 1 || s > p) {
        throw std::invalid_argument("Rng::sample_subset: need 1 <= s <= p");
    }
    // Floyd's algorithm: uniform over s-subsets, O(s) memory.
    std::unordered_set<int> chosen;
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(s));
    for (int j = p - s + 1; j <= p; ++j) {
        const int candidate = uniform_int(1, j);
        if (chosen.insert(candidate).second) {
            out.push_back(candidate);
        } else {
            chosen.insert(j);
            out.push_back(j);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace kslab
