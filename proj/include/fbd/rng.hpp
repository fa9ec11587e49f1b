#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace fbd {

/// Philox4x32-10 counter-based generator.
///
/// The pair (seed, stream) selects an independent sequence; the position in
/// that sequence is an explicit 64-bit counter, so any draw can be reproduced
/// without replaying earlier ones. Satisfies UniformRandomBitGenerator.
class Philox {
public:
    using result_type = std::uint32_t;

    Philox(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() noexcept;

    /// Exp(1) by inversion of the uniform.
    double exponential() noexcept;

    std::uint64_t seed() const noexcept { return key_seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    /// Raw block function, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) noexcept;

private:
    void refill() noexcept;

    std::uint64_t key_seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

}  // namespace fbd
