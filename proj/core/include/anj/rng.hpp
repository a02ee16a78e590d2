#pragma once

#include <array>
#include <cstdint>

namespace anj {

/// Counter-based random stream (Philox4x32-10). The 64-bit seed is the key;
/// stream_id occupies the upper half of the 128-bit counter, so distinct
/// stream ids never share a counter value and each (seed, stream_id) pair
/// reproduces the same sequence on every platform.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() noexcept;
    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    double uniform() noexcept;

    // UniformRandomBitGenerator interface.
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    result_type operator()() noexcept { return next_u64(); }

    /// One Philox4x32-10 block: exposed for known-answer tests.
    static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> counter,
                                               std::array<std::uint32_t, 2> key) noexcept;

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

}  // namespace anj
