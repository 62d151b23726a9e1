#pragma once

// Counter-based random numbers (Philox4x32-10). A stream is identified by
// (seed, replicate, stream id), so replicates can be generated in any order
// or in parallel and still yield identical values.

#include <array>
#include <cstdint>

namespace agnostic::random {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32 block with 10 rounds.
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key) noexcept;

class UniformStream {
 public:
  UniformStream(std::uint64_t seed, std::uint64_t replicate,
                std::uint32_t stream) noexcept;

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double next() noexcept;

  /// Uniform integer in [0, bound) without modulo bias. bound > 0.
  std::uint64_t next_below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t next_bits() noexcept;

  PhiloxKey key_;
  std::uint64_t replicate_;
  std::uint32_t stream_;
  std::uint32_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

/// Standard normal variates by inverse-CDF transform of a UniformStream.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t replicate,
               std::uint32_t stream) noexcept
      : uniform_(seed, replicate, stream) {}

  double next();

 private:
  UniformStream uniform_;
};

}  // namespace agnostic::random
