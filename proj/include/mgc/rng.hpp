#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mgc {

/// Deterministic generator used by every randomized operation.
///
/// Backed by std::mt19937_64 seeded with the caller's 64-bit seed. Bounded
/// draws use rejection sampling on the raw 64-bit output so that results do
/// not depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform integer in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool coin(double p_true) {
        return static_cast<double>(next() >> 11) * 0x1.0p-53 < p_true;
    }

    /// Derive an independent child seed; used to give subcomputations their own streams.
    std::uint64_t fork() { return next() ^ 0x9e3779b97f4a7c15ULL; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace mgc
