#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace mil {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every draw is a
// pure function of (key, counter), so independent substreams never share state.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  static Block generate(std::uint64_t key, Block ctr) noexcept {
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0, static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1, static_cast<std::uint32_t>(p0)};
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return ctr;
  }
};

// Stream tags keep the substreams of different consumers disjoint.
enum class StreamTag : std::uint16_t {
  init_neuron = 1,
  sgd_sample = 2,
  directions = 3,
  ridge_train = 4,
  ridge_val = 5,
  ridge_test = 6,
  gronwall_trial = 7,
  init_stats_trial = 8,
  monte_carlo = 9,
  synthetic = 10,
};

constexpr std::uint64_t stream_id(StreamTag tag, std::uint64_t index) noexcept {
  return (static_cast<std::uint64_t>(tag) << 48) ^ (index & 0x0000FFFFFFFFFFFFull);
}

// Sequential view over one substream: draws uniforms and standard normals from
// Philox blocks addressed by (seed, stream, position).
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}
  StreamRng(std::uint64_t seed, StreamTag tag, std::uint64_t index) noexcept
      : StreamRng(seed, stream_id(tag, index)) {}

  std::uint32_t next_u32() noexcept {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept {
    const std::uint64_t hi = next_u32() >> 5;  // 27 bits
    const std::uint64_t lo = next_u32() >> 6;  // 26 bits
    return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
  }

  // Uniform in (0, 1].
  double uniform_open0() noexcept { return 1.0 - uniform(); }

  // Box-Muller; libstdc++'s normal_distribution is not portable bit-for-bit.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open0()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  void refill() noexcept {
    buf_ = Philox4x32::generate(
        seed_, {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)});
    ++block_;
    pos_ = 0;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Block buf_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mil
