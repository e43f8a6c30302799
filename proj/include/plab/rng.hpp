#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace plab {

/// Philox4x32-10 counter-based block cipher.
///
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
/// Stateless: any block of any stream can be produced in O(1).
class Philox4x32
{
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) noexcept;
};

/// SplitMix64 finalizer; a bijective 64-bit mixing function.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Identifies one independent random stream.
///
/// The Philox key of a stream is
///   key = splitmix64(splitmix64(master_seed) ^ splitmix64(stream_id + 1)).
/// Within a stream, path p uses counters (block, 0, lo32(p), hi32(p)), so
/// each path is a separate substream whose draws do not depend on how many
/// values other paths consumed.
struct RngStreamSpec
{
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    Philox4x32::Key key() const noexcept;
};

/// Sequential 64-bit engine over one path substream; satisfies
/// UniformRandomBitGenerator.
class PathEngine
{
public:
    using result_type = std::uint64_t;

    PathEngine(const RngStreamSpec& stream, std::uint64_t path_index) noexcept;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

private:
    void refill() noexcept;

    Philox4x32::Key key_;
    Philox4x32::Counter ctr_;
    std::array<std::uint64_t, 2> buf_{};
    int pos_ = 2;
};

/// Standard normal variates for one path substream (ziggurat via Boost.Random).
class NormalSource
{
public:
    NormalSource(const RngStreamSpec& stream, std::uint64_t path_index) noexcept
        : engine_(stream, path_index)
    {
    }

    double operator()() { return normal_(engine_); }

    /// Uniform on [0,1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    PathEngine engine_;
    boost::random::normal_distribution<double> normal_;
};

}  // namespace plab
