#pragma once

#include <cmath>
#include <cstdint>

namespace qca {

// Counter-based random generator. Every draw is a pure function of
// (seed, stream, counter), so parallel workers can consume disjoint
// streams without sharing state and results never depend on scheduling.
//
// Seeding scheme used throughout the library:
//   stream = mix(seed, trajectory_index)            for trajectory noise
//   stream = mix(mix(seed, trajectory_index), site) for per-site draws
// The mixer is SplitMix64; two rounds separate key and counter.

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}
} // namespace detail

inline std::uint64_t rng_mix(std::uint64_t key, std::uint64_t word) {
    return detail::splitmix64(detail::splitmix64(key) ^ word * 0xd1342543de82ef95ull);
}

class CounterRng {
  public:
    explicit CounterRng(std::uint64_t stream) : stream_(stream) {}
    CounterRng(std::uint64_t seed, std::uint64_t substream)
        : stream_(rng_mix(seed, substream)) {}

    std::uint64_t next_u64() { return rng_mix(stream_, counter_++); }

    // uniform in [0, 1)
    double uniform() {
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in (0, 1]; safe as argument of log()
    double uniform_open() {
        return double((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_open();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    CounterRng substream(std::uint64_t label) const {
        return CounterRng(rng_mix(stream_, label));
    }

  private:
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace qca
