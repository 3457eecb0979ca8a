#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace textens {

// splitmix64: tiny deterministic generator with identical output on every
// platform, unlike the std distributions. All seeded behaviour in the
// library goes through this.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform integer in [0, n); n must be > 0
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    // independent substream for (seed, index) pairs, e.g. one per tree
    static SplitMix64 derived(std::uint64_t seed, std::uint64_t index) {
        SplitMix64 mixer(seed ^ (0x9e3779b97f4a7c15ull * (index + 1)));
        return SplitMix64(mixer.next());
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    SplitMix64 rng(seed);
    rng.shuffle(idx);
    return idx;
}

}  // namespace textens
