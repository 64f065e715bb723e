#pragma once

// Monte Carlo estimators on a PathBatch: volatility swap strike, call prices
// by conditioning on the volatility path, a brute-force log-Euler oracle and
// pathwise Malliavin functionals.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "volbound/errors.hpp"
#include "volbound/estimate.hpp"
#include "volbound/gauss_bs.hpp"
#include "volbound/parallel.hpp"
#include "volbound/rng.hpp"
#include "volbound/sabr.hpp"

namespace volbound {

/// Sample mean of sqrt(Y / T). Independent of rho by construction.
inline Estimate volswap_strike(const PathBatch& batch) {
  const auto Y = batch.integrated_variance();
  const double inv_T = 1.0 / batch.horizon();
  return sample_mean(batch.size(), [&](std::size_t i) { return std::sqrt(Y[i] * inv_T); });
}

/// Call price with log strike k. Conditional on W the log price is normal, so
/// each path contributes bs_call(x0 + rho*IW - rho^2 Y/2, k, T, sqrt((1-rho^2) Y/T)).
/// At |rho| = 1 the conditional volatility vanishes and bs_call returns the
/// intrinsic value.
inline Estimate mixing_call_price(const PathBatch& batch, double rho, double k) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw InvalidConfig("mixing_call_price: |rho| must be <= 1");
  const auto Y = batch.integrated_variance();
  const auto iw = batch.stochastic_integral();
  const double T = batch.horizon();
  const double x0 = batch.params().x0;
  const double residual_var = std::abs(rho) == 1.0 ? 0.0 : (1.0 - rho * rho);
  return sample_mean(batch.size(), [&](std::size_t i) {
    const double x = x0 + rho * iw[i] - 0.5 * rho * rho * Y[i];
    const double sigma = std::sqrt(residual_var * Y[i] / T);
    return bs_call({x, k, T, sigma});
  });
}

/// Brute-force call price: log-Euler on the spot with exact volatility
/// updates. W normals come from stream 0 (the same draws simulate_paths uses
/// for the same seed and steps), B normals from stream 1.
inline Estimate euler_oracle_price(const SabrParams& p, double T, double k, std::size_t steps,
                                   std::size_t n, std::uint64_t seed) {
  if (steps == 0) throw InvalidConfig("euler_oracle_price: steps must be >= 1");
  if (n == 0) throw InvalidConfig("euler_oracle_price: n must be >= 1");
  if (!(T > 0.0)) throw InvalidConfig("euler_oracle_price: T must be positive");
  p.validate();
  const double dt = T / static_cast<double>(steps);
  const double sqdt = std::sqrt(dt);
  const double vol_step = p.alpha * sqdt;
  const double drift = 0.5 * p.alpha * p.alpha * dt;
  const double rho_perp = std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho));
  const double strike = std::exp(k);

  std::vector<MomentAccumulator> partial(chunk_count(n));
  for_each_chunk(n, [&](std::size_t c, std::size_t begin, std::size_t end) {
    std::vector<double> zw(steps), zb(steps);
    for (std::size_t i = begin; i < end; ++i) {
      NormalStream(seed, i, 0).fill(zw);
      NormalStream(seed, i, 1).fill(zb);
      double sigma = p.sigma0;
      double x = p.x0;
      for (std::size_t j = 0; j < steps; ++j) {
        x += -0.5 * sigma * sigma * dt + sigma * sqdt * (p.rho * zw[j] + rho_perp * zb[j]);
        sigma *= std::exp(vol_step * zw[j] - drift);
      }
      partial[c].add(std::max(std::exp(x) - strike, 0.0));
    }
  });
  MomentAccumulator total;
  for (const auto& a : partial) total.merge(a);
  return total.estimate();
}

struct MalliavinEstimates {
  Estimate t1;
  Estimate t2;
  Estimate t3;
  Estimate t4;
};

/// Per-path values of the four Malliavin functionals at t = 0, by trapezoidal
/// quadrature on the stored grid:
///   T4 = 2 alpha int_0^T sigma_r^2 r dr,   T1 = T4^2,
///   T2 = 2 alpha^2 int_0^T r sigma_r int_r^T sigma_u^2 du dr,
///   T3 = 4 alpha^2 int_0^T r int_r^T sigma_u^2 du dr.
inline std::array<double, 4> malliavin_path_values(const VolPathView& path) {
  const auto& s = path.sigma;
  const std::size_t m = s.size() - 1;
  const double dt = path.dt;
  const double a = path.alpha;
  // tail[j] = int_{t_j}^T sigma^2, built backwards.
  std::vector<double> tail(m + 1);
  tail[m] = 0.0;
  for (std::size_t j = m; j-- > 0;) {
    tail[j] = tail[j + 1] + 0.5 * dt * (s[j] * s[j] + s[j + 1] * s[j + 1]);
  }
  auto trapezoid = [&](auto&& f) {
    double acc = 0.5 * (f(0) + f(m));
    for (std::size_t j = 1; j < m; ++j) acc += f(j);
    return acc * dt;
  };
  const double t4 = 2.0 * a * trapezoid([&](std::size_t j) { return s[j] * s[j] * (j * dt); });
  const double t2 =
      2.0 * a * a * trapezoid([&](std::size_t j) { return (j * dt) * s[j] * tail[j]; });
  const double t3 = 4.0 * a * a * trapezoid([&](std::size_t j) { return (j * dt) * tail[j]; });
  return {t4 * t4, t2, t3, t4};
}

inline MalliavinEstimates malliavin_functionals(const PathBatch& batch) {
  if (!batch.has_paths()) {
    throw MissingPaths("malliavin_functionals: batch was simulated without full paths");
  }
  const auto e = sample_means<4>(batch.size(),
                                 [&](std::size_t i) { return malliavin_path_values(batch.path(i)); });
  return {e[0], e[1], e[2], e[3]};
}

}  // namespace volbound
