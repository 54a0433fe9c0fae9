#pragma once

#include <array>
#include <cstdint>

namespace succession {

/// Philox 4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw,
/// "Parallel random numbers: as easy as 1, 2, 3", SC'11).
///
/// The 128-bit counter is split into a 64-bit block index (low words) and a
/// 64-bit stream id (high words); the 64-bit seed is the key. Distinct
/// stream ids give statistically independent substreams of the same seed,
/// which is how per-trial substreams are derived: stream = trial index.
/// The generator is pure integer arithmetic, so the uint64 output stream is
/// identical on every conforming platform.
class PhiloxRng {
  public:
    explicit PhiloxRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    std::uint64_t next_u64() noexcept {
        if (available_ == 0) refill();
        return buffer_[2 - available_--];
    }

    /// Uniform double in [0,1) with 53 random bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// One 10-round Philox block; exposed for known-answer tests.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key) noexcept {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53} * counter[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57} * counter[2];
            counter = {static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ key[0],
                       static_cast<std::uint32_t>(p1),
                       static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ key[1],
                       static_cast<std::uint32_t>(p0)};
            key[0] += 0x9E3779B9;
            key[1] += 0xBB67AE85;
        }
        return counter;
    }

  private:
    void refill() noexcept {
        const auto out = block({static_cast<std::uint32_t>(block_index_),
                                static_cast<std::uint32_t>(block_index_ >> 32),
                                static_cast<std::uint32_t>(stream_),
                                static_cast<std::uint32_t>(stream_ >> 32)},
                               key_);
        buffer_[0] = out[0] | (std::uint64_t{out[1]} << 32);
        buffer_[1] = out[2] | (std::uint64_t{out[3]} << 32);
        ++block_index_;
        available_ = 2;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_ = 0;
    std::uint64_t block_index_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int available_ = 0;
};

}  // namespace succession
