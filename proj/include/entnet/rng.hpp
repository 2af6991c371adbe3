#pragma once

// Counter-based random numbers for reproducible Monte Carlo.
//
// Every draw is a pure function of (master seed, a small tuple of stream
// indices, counter).  Two properties follow and are relied on throughout:
//
//  * worker-pool independence: a trial's draws depend only on its indices,
//    never on which thread ran it or in what order, so estimates are
//    bit-identical for any pool size;
//  * monotone coupling: the per-edge/per-site uniforms used by the
//    percolation trials are fixed once (seed, trial, element) are fixed, so
//    an indicator thresholded against p is monotone in p across a whole
//    probability grid.
//
// The mixer is the SplitMix64 finalizer (Steele/Lea/Flood constants), which
// is statistically solid for simulation workloads and dependency-free.

#include <cstdint>

namespace entnet {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Key derivation: fold stream indices into the seed one by one.  Each fold
// passes through the full avalanche of mix64, so (seed, a, b) and
// (seed, b, a) land in unrelated streams.
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a) {
    return mix64(seed ^ (a + kGolden));
}
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive_key(derive_key(seed, a), b);
}
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                std::uint64_t c) {
    return derive_key(derive_key(seed, a, b), c);
}

// 53-bit uniform in [0, 1).
inline double u64_to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Stateless counter draw: the n-th uniform of the stream identified by key.
inline double counter_uniform(std::uint64_t key, std::uint64_t counter) {
    return u64_to_unit(mix64(key + counter * kGolden));
}

// Small sequential generator over one derived stream, for code that wants a
// conventional draw-next interface (protocol rounds, outcome sampling).
class StreamRng {
  public:
    explicit StreamRng(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix64(state_);
    }
    double next_unit() { return u64_to_unit(next_u64()); }
    bool bernoulli(double p) { return next_unit() < p; }
    // Uniform integer in [0, n) for small n (n <= 2^32; modulo bias is
    // < 2^-32 and irrelevant at Monte Carlo precision).
    std::uint32_t next_below(std::uint32_t n) {
        return static_cast<std::uint32_t>(next_u64() % n);
    }

  private:
    std::uint64_t state_;
};

} // namespace entnet
