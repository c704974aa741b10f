#pragma once

#include <cmath>
#include <cstdint>

namespace rwre {

// Deterministic stream derivation. Every random draw in the library is keyed
// by a path through derive() calls starting from the user seed, so a run is
// reproducible for any thread count and any evaluation order.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer; good 64-bit avalanche.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

// Child stream key: equivalent to reading the (id+1)-th output of a splitmix64
// generator seeded at `key`, so sibling streams are statistically independent.
inline constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t id) {
    return mix64(key + kGolden * (id + 1));
}

// Uniform in [0,1) from a 64-bit word (53 mantissa bits).
inline constexpr double u01(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Stream-role tags. Keeping them distinct stops unrelated substreams from
// colliding when they share an index space.
namespace stream {
inline constexpr std::uint64_t env_sites = 1;
inline constexpr std::uint64_t env_left_attempt = 2;
inline constexpr std::uint64_t paths = 3;
inline constexpr std::uint64_t tau = 4;
inline constexpr std::uint64_t pair_table = 5;
inline constexpr std::uint64_t scratch = 6;
}  // namespace stream

// xoshiro256++ seeded from a stream key via splitmix64 expansion.
class Rng {
  public:
    explicit Rng(std::uint64_t key) : key_(key) {
        std::uint64_t s = key;
        for (auto& w : state_) {
            s += kGolden;
            w = mix64(s);
        }
        // A zero state would be absorbing; mix64 of distinct inputs makes that
        // practically impossible, but guard anyway.
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = kGolden;
    }

    std::uint64_t key() const { return key_; }

    // Independent substream; derived from the key, not the advanced state, so
    // the same (key, id) always names the same stream.
    Rng child(std::uint64_t id) const { return Rng(derive(key_, id)); }

    std::uint64_t next_u64() {
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

    // Uniform in [0,1).
    double uniform() { return u01(next_u64()); }

    // Standard exponential; uniform() < 1 keeps the log argument positive.
    double exponential() { return -std::log1p(-uniform()); }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t key_;
    std::uint64_t state_[4];
};

// Counter-based uniform: the draw attached to (key, index) with no generator
// state. Signed indices (environment sites) map through two's complement.
inline double indexed_u01(std::uint64_t key, std::int64_t index) {
    return u01(mix64(derive(key, static_cast<std::uint64_t>(index))));
}

}  // namespace rwre
