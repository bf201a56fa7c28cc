#pragma once

// Counter-based deterministic RNG: every draw hashes (seed, stream, counter)
// through splitmix64, so streams can be split per instance or per draw and
// outputs are identical across platforms and thread schedules.

#include <cstdint>

namespace obed {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

class SplitMixRng {
  public:
    explicit SplitMixRng(std::uint64_t seed, std::uint64_t stream = 0)
        : state_(splitmix64(seed + 0x632be59bd9b4e019ull * stream)) {}

    std::uint64_t next() {
        state_ = splitmix64(state_ + counter_++);
        return state_;
    }

    // Uniform in [0, 1).
    double uniform() { return (double)(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  private:
    std::uint64_t state_;
    std::uint64_t counter_ = 0;
};

}  // namespace obed
