#include "agnostic/random.hpp"

#include "agnostic/specfun.hpp"

namespace agnostic::random {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
  const std::uint64_t product = std::uint64_t{a} * std::uint64_t{b};
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

UniformStream::UniformStream(std::uint64_t seed, std::uint64_t replicate,
                             std::uint32_t stream) noexcept
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)},
      replicate_(replicate),
      stream_(stream) {}

std::uint64_t UniformStream::next_bits() noexcept {
  if (buffered_ == 0) {
    const PhiloxCounter out =
        philox4x32({block_, static_cast<std::uint32_t>(replicate_),
                    static_cast<std::uint32_t>(replicate_ >> 32), stream_},
                   key_);
    ++block_;
    buffer_[0] = (std::uint64_t{out[0]} << 32) | out[1];
    buffer_[1] = (std::uint64_t{out[2]} << 32) | out[3];
    buffered_ = 2;
  }
  return buffer_[2 - buffered_--];
}

double UniformStream::next() noexcept {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(next_bits() >> 11) + 0.5) * kScale;
}

std::uint64_t UniformStream::next_below(std::uint64_t bound) noexcept {
  // Lemire's rejection on the 128-bit product.
  std::uint64_t x = next_bits();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next_bits();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double NormalStream::next() {
  return specfun::std_normal_quantile(uniform_.next());
}

}  // namespace agnostic::random
