#include "plab/rng.hpp"

namespace plab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept
{
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept
{
    for (int round = 0; round < 10; ++round)
    {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

Philox4x32::Key RngStreamSpec::key() const noexcept
{
    const std::uint64_t k = splitmix64(splitmix64(master_seed) ^ splitmix64(stream_id + 1));
    return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

PathEngine::PathEngine(const RngStreamSpec& stream, std::uint64_t path_index) noexcept
    : key_(stream.key()),
      ctr_{0u, 0u, static_cast<std::uint32_t>(path_index), static_cast<std::uint32_t>(path_index >> 32)}
{
}

void PathEngine::refill() noexcept
{
    const auto out = Philox4x32::generate(ctr_, key_);
    buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    if (++ctr_[0] == 0)
        ++ctr_[1];
    pos_ = 0;
}

PathEngine::result_type PathEngine::operator()() noexcept
{
    if (pos_ == 2)
        refill();
    return buf_[pos_++];
}

}  // namespace plab
