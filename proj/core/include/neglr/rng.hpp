#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace neglr {

/// Seedable, splittable generator.
///
/// Wraps mt19937_64 (whose output sequence is fixed by the standard) and
/// derives every distribution by hand, so streams are bit-identical across
/// standard library implementations. `split()` derives an independent child
/// stream through SplitMix64, leaving this stream's future draws untouched
/// by how many children exist.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01();

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);

    /// Uniform integer on [0, n). n must be positive.
    std::size_t below(std::size_t n);

    /// Child stream keyed by `stream`; the same (seed, stream) always
    /// produces the same child.
    Rng split(std::uint64_t stream) const;

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = below(i);
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace neglr
