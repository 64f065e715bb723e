#pragma once

// Normal distribution and zero-rate Black-Scholes call analytics in log
// coordinates: spot e^x, strike e^k, time to maturity tau.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "volbound/errors.hpp"

namespace volbound {

struct BsQuote {
  double x = 0.0;
  double k = 0.0;
  double tau = 0.0;
  double sigma = 0.0;
};

struct D1D2 {
  double d1;
  double d2;
};

inline constexpr double kMaxImpliedVol = 5.0;
inline constexpr double kMinImpliedVol = 1e-9;
inline constexpr double kImpliedVolPriceTol = 1e-12;

inline double normal_cdf(double z) noexcept {
  return 0.5 * std::erfc(-z * (1.0 / std::numbers::sqrt2));
}

inline double normal_pdf(double z) noexcept {
  constexpr double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

inline D1D2 d1d2(const BsQuote& q) {
  const double total_vol = q.sigma * std::sqrt(q.tau);
  if (!(total_vol > 0.0) || !std::isfinite(total_vol)) {
    throw std::domain_error("d1d2: sigma*sqrt(tau) must be positive and finite");
  }
  const double d1 = (q.x - q.k) / total_vol + 0.5 * total_vol;
  return {d1, d1 - total_vol};
}

/// Call price e^x N(d1) - e^k N(d2). A zero total volatility returns the
/// intrinsic value, which the mixing estimator relies on at |rho| = 1.
inline double bs_call(const BsQuote& q) {
  const double total_vol = q.sigma * std::sqrt(q.tau);
  if (total_vol == 0.0) {
    return std::max(std::exp(q.x) - std::exp(q.k), 0.0);
  }
  const auto [d1, d2] = d1d2(q);
  return std::exp(q.x) * normal_cdf(d1) - std::exp(q.k) * normal_cdf(d2);
}

inline double bs_vega(const BsQuote& q) {
  const auto [d1, d2] = d1d2(q);
  return std::exp(q.x) * normal_pdf(d1) * std::sqrt(q.tau);
}

/// Inverts bs_call in sigma. Newton steps on vega, safeguarded by a shrinking
/// bisection bracket on [kMinImpliedVol, kMaxImpliedVol].
///
/// Throws OutOfBounds when price is not strictly inside
/// (max(e^x - e^k, 0), e^x) or is not attainable with sigma <= kMaxImpliedVol,
/// and NoConvergence when the price residual stays above 1e-12.
inline double implied_vol(double price, double x, double k, double tau) {
  if (!(tau > 0.0)) {
    throw std::domain_error("implied_vol: tau must be positive");
  }
  const double spot = std::exp(x);
  const double intrinsic = std::max(spot - std::exp(k), 0.0);
  if (!(price > intrinsic && price < spot)) {
    throw OutOfBounds("implied_vol: price " + std::to_string(price) +
                      " outside arbitrage bounds (" + std::to_string(intrinsic) + ", " +
                      std::to_string(spot) + ")");
  }
  auto f = [&](double s) { return bs_call({x, k, tau, s}) - price; };

  double lo = kMinImpliedVol;
  double hi = kMaxImpliedVol;
  if (f(hi) < 0.0) {
    throw OutOfBounds("implied_vol: price needs sigma above " + std::to_string(kMaxImpliedVol));
  }
  if (f(lo) > 0.0) {
    return lo;
  }

  // Start from the inflection point of the price in sigma, where Newton is
  // globally convergent for calls.
  double sigma = std::clamp(std::sqrt(2.0 * std::abs(x - k) / tau), 0.05, 1.0);
  if (sigma <= lo || sigma >= hi) sigma = 0.5 * (lo + hi);

  constexpr int max_iter = 200;
  double best_sigma = sigma;
  double best_abs = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const double fx = f(sigma);
    if (std::abs(fx) < best_abs) {
      best_abs = std::abs(fx);
      best_sigma = sigma;
    }
    if (fx == 0.0) return sigma;
    if (fx > 0.0) {
      hi = sigma;
    } else {
      lo = sigma;
    }
    const double vega = bs_vega({x, k, tau, sigma});
    double next;
    if (vega < 1e-14) {
      next = 0.5 * (lo + hi);
    } else {
      next = sigma - fx / vega;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    }
    // Keep going past the price tolerance until the step stalls: one more
    // quadratic step puts sigma at full precision.
    if (std::abs(next - sigma) <= 4.0 * std::numeric_limits<double>::epsilon() * sigma ||
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      sigma = next;
      break;
    }
    sigma = next;
  }
  const double final_abs = std::abs(f(sigma));
  if (final_abs < best_abs) {
    best_abs = final_abs;
    best_sigma = sigma;
  }
  if (best_abs > kImpliedVolPriceTol) {
    throw NoConvergence("implied_vol: residual " + std::to_string(best_abs) + " above tolerance");
  }
  return best_sigma;
}

}  // namespace volbound
