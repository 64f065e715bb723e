#pragma once

// Keyed random streams. Every (seed, path, stream) triple owns an independent
// xoshiro256** sequence, so path i draws the same numbers no matter which
// worker simulates it.

#include <Eigen/Core>

#include <cstdint>
#include <span>

namespace volbound {

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Xoshiro256 {
 public:
  Xoshiro256(std::uint64_t seed, std::uint64_t path, std::uint64_t stream) noexcept {
    std::uint64_t sm = seed;
    const std::uint64_t a = splitmix64(sm);
    sm = a ^ (path * 0xD1342543DE82EF95ULL);
    const std::uint64_t b = splitmix64(sm);
    sm = b ^ (stream * 0xA0761D6478BD642FULL + 0x632BE59BD9B4E019ULL);
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [-1, 1) with 2^-63 spacing.
  double symmetric_uniform() noexcept {
    return static_cast<double>(static_cast<std::int64_t>((*this)())) * 0x1p-63;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

/// Standard normal draws by the Marsaglia polar method; the log/sqrt stage is
/// vectorised over a block of candidate pairs.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t path, std::uint64_t stream) noexcept
      : gen_(seed, path, stream) {}

  void fill(std::span<double> out) {
    const auto n = static_cast<Eigen::Index>(out.size());
    Eigen::Index have = 0;
    while (have < n) {
      const Eigen::Index m = (n - have + 1) / 2 * 13 / 10 + 8;
      if (v1_.size() < m) {
        v1_.resize(m);
        v2_.resize(m);
      }
      for (Eigen::Index i = 0; i < m; ++i) {
        v1_[i] = gen_.symmetric_uniform();
        v2_[i] = gen_.symmetric_uniform();
      }
      s_ = v1_.head(m).square() + v2_.head(m).square();
      f_ = (-2.0 * s_.log() / s_).sqrt();
      for (Eigen::Index i = 0; i < m && have < n; ++i) {
        const double s = s_[i];
        if (s < 1.0 && s > 0.0) {
          out[have++] = v1_[i] * f_[i];
          if (have < n) out[have++] = v2_[i] * f_[i];
        }
      }
    }
  }

 private:
  Xoshiro256 gen_;
  Eigen::ArrayXd v1_, v2_, s_, f_;
};

}  // namespace volbound
