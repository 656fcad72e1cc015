#pragma once

// Philox4x32-10 counter-based generator: the output depends only on
// (key, counter), so any partition of work reproduces the same stream.

#include <array>
#include <cstdint>

namespace maxconf {

class Philox4x32 {
   public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter block(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

    static constexpr Key key_from_seed(std::uint64_t seed) {
        return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    }

    /// Four 32-bit words for (seed, index, stream).
    static constexpr Counter draw(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0) {
        return block({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
                     key_from_seed(seed));
    }

    /// Maps a word to the open interval (0, 1).
    static constexpr double to_unit(std::uint32_t w) { return (static_cast<double>(w) + 0.5) * 0x1p-32; }

    static constexpr std::array<double, 4> uniforms(std::uint64_t seed, std::uint64_t index,
                                                    std::uint64_t stream = 0) {
        const Counter w = draw(seed, index, stream);
        return {to_unit(w[0]), to_unit(w[1]), to_unit(w[2]), to_unit(w[3])};
    }
};

/// Sequential uniforms from one (seed, stream) pair, four per counter step.
class UniformStream {
   public:
    UniformStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    double next() {
        if (used_ == 4) {
            buffer_ = Philox4x32::uniforms(seed_, index_++, stream_);
            used_ = 0;
        }
        return buffer_[used_++];
    }

   private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t index_ = 0;
    std::array<double, 4> buffer_{};
    int used_ = 4;
};

}  // namespace maxconf
