#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "volbound/parallel.hpp"

namespace volbound {

/// Monte Carlo estimate: sample mean, standard error (sample sd / sqrt(n)) and
/// sample count.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Conservative standard error of a difference of two estimates: the sum.
inline double combined_se(const Estimate& a, const Estimate& b) noexcept {
  return a.std_error + b.std_error;
}

/// Streaming mean and sum of squared deviations (Welford), mergeable.
class MomentAccumulator {
 public:
  void add(double v) noexcept {
    ++n_;
    const double delta = v - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (v - mean_);
  }

  void merge(const MomentAccumulator& o) noexcept {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(o.n_);
    const double delta = o.mean_ - mean_;
    const double total = na + nb;
    mean_ += delta * nb / total;
    m2_ += o.m2_ + delta * delta * na * nb / total;
    n_ += o.n_;
  }

  Estimate estimate() const noexcept {
    Estimate e;
    e.n = n_;
    e.value = mean_;
    if (n_ > 1) {
      const double var = m2_ / static_cast<double>(n_ - 1);
      e.std_error = std::sqrt(var / static_cast<double>(n_));
    }
    return e;
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Sample means of K per-index statistics over [0, n). sample(i) returns a
/// std::array<double, K>. Chunk accumulators are merged in chunk order.
template <std::size_t K, class Sample>
std::array<Estimate, K> sample_means(std::size_t n, Sample&& sample) {
  std::vector<std::array<MomentAccumulator, K>> partial(chunk_count(n));
  for_each_chunk(n, [&](std::size_t c, std::size_t begin, std::size_t end) {
    auto& acc = partial[c];
    for (std::size_t i = begin; i < end; ++i) {
      const std::array<double, K> v = sample(i);
      for (std::size_t j = 0; j < K; ++j) acc[j].add(v[j]);
    }
  });
  std::array<MomentAccumulator, K> total{};
  for (const auto& p : partial) {
    for (std::size_t j = 0; j < K; ++j) total[j].merge(p[j]);
  }
  std::array<Estimate, K> out{};
  for (std::size_t j = 0; j < K; ++j) out[j] = total[j].estimate();
  return out;
}

template <class Sample>
Estimate sample_mean(std::size_t n, Sample&& sample) {
  return sample_means<1>(n, [&](std::size_t i) { return std::array<double, 1>{sample(i)}; })[0];
}

}  // namespace volbound
