#pragma once

#include <array>
#include <cstdint>

namespace sirlat {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Stateless: the output is a pure function of (counter, key).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key)
{
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kW0;
        key[1] += kW1;
    }
    return ctr;
}

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Purpose tags keep the streams of different consumers disjoint.
enum class StreamTag : std::uint64_t {
    site_infection = 1,
    percolation_edge = 2,
    oriented_edge = 3,
    test = 99,
};

/// 64-bit Philox key derived from (seed, replicate, tag).
inline std::array<std::uint32_t, 2> derive_key(std::uint64_t seed, std::uint64_t replicate, StreamTag tag)
{
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ replicate);
    k = splitmix64(k ^ static_cast<std::uint64_t>(tag));
    return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

/// Uniform variates for one logical draw site: counter words 1..3 are fixed
/// coordinates and word 0 counts blocks.
class CounterStream {
public:
    CounterStream(std::array<std::uint32_t, 2> key, std::uint32_t c1, std::uint32_t c2, std::uint32_t c3)
        : key_(key), ctr_{0u, c1, c2, c3}
    {
    }

    std::uint32_t next_u32()
    {
        if (pos_ == 4) {
            buf_ = philox4x32(ctr_, key_);
            ++ctr_[0];
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    std::uint64_t next_u64()
    {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform()
    {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

/// Signed lattice coordinate as a counter word.
inline std::uint32_t coord_word(int v) { return static_cast<std::uint32_t>(v); }

}  // namespace sirlat
