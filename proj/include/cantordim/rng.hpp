#ifndef CANTORDIM_RNG_HPP
#define CANTORDIM_RNG_HPP

#include <array>
#include <cstdint>

namespace cantordim {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Output depends only on (key, counter), so every walker owns an
/// independent stream keyed by (seed) with the walker index in the upper
/// counter words; no state is shared between walkers.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Uniform doubles for one (seed, stream) pair; two doubles per Philox block.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept {
        if (cached_ == 0) {
            const Philox4x32::Counter ctr{static_cast<std::uint32_t>(counter_),
                                          static_cast<std::uint32_t>(counter_ >> 32),
                                          static_cast<std::uint32_t>(stream_),
                                          static_cast<std::uint32_t>(stream_ >> 32)};
            ++counter_;
            block_ = Philox4x32::block(ctr, key_);
            cached_ = 2;
        }
        const std::size_t off = cached_ == 2 ? 0 : 2;
        --cached_;
        const std::uint64_t bits = (std::uint64_t{block_[off]} << 32) | block_[off + 1];
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

    std::uint64_t blocks_used() const noexcept { return counter_; }

private:
    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    Philox4x32::Counter block_{};
    int cached_ = 0;
};

}  // namespace cantordim

#endif  // CANTORDIM_RNG_HPP
