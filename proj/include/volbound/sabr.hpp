#pragma once

// Lognormal SABR volatility: d sigma = alpha sigma dW, simulated with exact
// lognormal increments. Integrated variance uses the trapezoidal rule.

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "volbound/errors.hpp"
#include "volbound/parallel.hpp"
#include "volbound/rng.hpp"

namespace volbound {

struct SabrParams {
  double sigma0 = 0.3;
  double alpha = 0.5;
  double rho = 0.0;
  double x0 = 0.0;

  void validate() const {
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw InvalidConfig("sigma0 must be positive");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidConfig("alpha must be positive");
    if (!(rho >= -1.0 && rho <= 1.0)) throw InvalidConfig("rho must lie in [-1, 1]");
    if (!std::isfinite(x0)) throw InvalidConfig("x0 must be finite");
  }
};

/// E[sigma_t^n] = sigma0^n exp(n(n-1) alpha^2 t / 2).
inline double moment_sigma(const SabrParams& p, double t, int order) {
  const double n = order;
  return std::pow(p.sigma0, n) * std::exp(0.5 * n * (n - 1.0) * p.alpha * p.alpha * t);
}

/// Integral of E[sigma_s^2] over [0, T]: sigma0^2 (e^{alpha^2 T} - 1) / alpha^2.
inline double expected_integrated_variance(const SabrParams& p, double T) {
  const double a2 = p.alpha * p.alpha;
  const double c = a2 * T;
  const double s2 = p.sigma0 * p.sigma0;
  if (c == 0.0) return s2 * T;
  return s2 * T * std::expm1(c) / c;
}

enum class PathStorage { summaries, full };

/// One simulated volatility path on the uniform grid t_i = i * dt.
struct VolPathView {
  std::span<const double> sigma;  // steps + 1 values, sigma[0] = sigma0
  double dt;
  double alpha;
};

/// Per-path summaries of a batch of volatility paths: integrated variance Y,
/// terminal volatility and the stochastic integral of sigma dW, which equals
/// (sigma_T - sigma0) / alpha exactly. Immutable once built.
class PathBatch {
 public:
  const SabrParams& params() const noexcept { return params_; }
  double horizon() const noexcept { return T_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t size() const noexcept { return Y_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& scheme() const noexcept { return scheme_; }

  std::span<const double> integrated_variance() const noexcept { return Y_; }
  std::span<const double> sigma_end() const noexcept { return sigma_end_; }
  std::span<const double> stochastic_integral() const noexcept { return iw_; }

  bool has_paths() const noexcept { return !paths_.empty(); }

  VolPathView path(std::size_t i) const {
    if (!has_paths()) throw MissingPaths("PathBatch holds per-path summaries only");
    if (i >= size()) throw IndexError("PathBatch::path: index out of range");
    const std::size_t stride = steps_ + 1;
    return {std::span<const double>(paths_).subspan(i * stride, stride),
            T_ / static_cast<double>(steps_), params_.alpha};
  }

 private:
  friend PathBatch simulate_paths(const SabrParams&, double, std::size_t, std::size_t,
                                  std::uint64_t, PathStorage);
  SabrParams params_;
  double T_ = 0.0;
  std::size_t steps_ = 0;
  std::uint64_t seed_ = 0;
  std::string scheme_ = "exact-lognormal/trapezoid";
  std::vector<double> Y_, sigma_end_, iw_, paths_;
};

/// Simulates n volatility paths of `steps` exact lognormal increments over
/// [0, T]. Path i uses the normal stream keyed by (seed, i, 0); the Euler oracle
/// reuses that stream for W.
inline PathBatch simulate_paths(const SabrParams& p, double T, std::size_t steps, std::size_t n,
                                std::uint64_t seed, PathStorage storage = PathStorage::summaries) {
  if (steps == 0) throw InvalidConfig("simulate_paths: steps must be >= 1");
  if (n == 0) throw InvalidConfig("simulate_paths: n must be >= 1");
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidConfig("simulate_paths: T must be positive");
  p.validate();

  PathBatch b;
  b.params_ = p;
  b.T_ = T;
  b.steps_ = steps;
  b.seed_ = seed;
  b.Y_.resize(n);
  b.sigma_end_.resize(n);
  b.iw_.resize(n);
  if (storage == PathStorage::full) b.paths_.resize(n * (steps + 1));

  const double dt = T / static_cast<double>(steps);
  const double vol_step = p.alpha * std::sqrt(dt);
  const double drift = 0.5 * p.alpha * p.alpha * dt;
  const double s0 = p.sigma0;
  const double s0sq = s0 * s0;
  const auto m = static_cast<Eigen::Index>(steps);

  for_each_chunk(n, [&](std::size_t, std::size_t begin, std::size_t end) {
    Eigen::ArrayXd z(m), log_ratio(m), ratio(m), var_ratio(m);
    for (std::size_t i = begin; i < end; ++i) {
      NormalStream normals(seed, i, 0);
      normals.fill({z.data(), steps});
      double acc = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        acc += vol_step * z[j] - drift;
        log_ratio[j] = acc;
      }
      ratio = log_ratio.exp();
      var_ratio = ratio.square();
      // Trapezoid: dt * (s_0^2/2 + s_1^2 + ... + s_{m-1}^2 + s_m^2/2).
      const double interior = var_ratio.head(m - 1).sum();
      const double Y = dt * s0sq * (0.5 + interior + 0.5 * var_ratio[m - 1]);
      const double sT = s0 * ratio[m - 1];
      b.Y_[i] = Y;
      b.sigma_end_[i] = sT;
      b.iw_[i] = (sT - s0) / p.alpha;
      if (storage == PathStorage::full) {
        double* row = b.paths_.data() + i * (steps + 1);
        row[0] = s0;
        for (Eigen::Index j = 0; j < m; ++j) row[j + 1] = s0 * ratio[j];
      }
    }
  });
  return b;
}

}  // namespace volbound
