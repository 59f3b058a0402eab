#pragma once

#include <array>
#include <cstdint>

namespace qkrd::rng {

// Philox4x32-10 counter-based generator. Chosen so that a (seed, stream)
// pair reproduces the exact same draw sequence on every platform; the
// counter layout is (block_lo, block_hi, stream_lo, stream_hi) and the key
// is the 64-bit seed split into two words.
class Philox {
 public:
  using result_type = std::uint32_t;

  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffu; }

  result_type operator()() {
    if (pos_ == 4) {
      block_ = generate_block(counter_++);
      pos_ = 0;
    }
    return block_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = (*this)();
    const std::uint64_t hi = (*this)();
    return lo | (hi << 32);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection-free would bias for huge n; n here is always tiny.
    return next_u64() % n;
  }

  // Raw block for known-answer tests.
  static std::array<std::uint32_t, 4> raw(
      const std::array<std::uint32_t, 4>& counter,
      const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> c = counter;
    std::array<std::uint32_t, 2> k = key;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k[0] += 0x9e3779b9u;
        k[1] += 0xbb67ae85u;
      }
      c = single_round(c, k);
    }
    return c;
  }

 private:
  static std::array<std::uint32_t, 4> single_round(
      const std::array<std::uint32_t, 4>& c,
      const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = 0xd2511f53ull * c[0];
    const std::uint64_t p1 = 0xcd9e8d57ull * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }

  std::array<std::uint32_t, 4> generate_block(std::uint64_t block) const {
    return raw({static_cast<std::uint32_t>(block),
                static_cast<std::uint32_t>(block >> 32),
                static_cast<std::uint32_t>(stream_),
                static_cast<std::uint32_t>(stream_ >> 32)},
               key_);
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int pos_ = 4;
};

// Stable 64-bit mixer for deriving substream ids from structured inputs
// (master seed, instance index, ...). SplitMix64 finalizer.
inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace qkrd::rng
