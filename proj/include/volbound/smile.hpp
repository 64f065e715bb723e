#pragma once

// At-the-money and zero-vanna implied volatilities read off mixing prices.
// Every trial strike reprices the same PathBatch, so the implied smile is a
// smooth function of the strike.

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "volbound/errors.hpp"
#include "volbound/estimate.hpp"
#include "volbound/gauss_bs.hpp"
#include "volbound/mc_engine.hpp"
#include "volbound/sabr.hpp"

namespace volbound {

inline constexpr double kZeroVannaResidualTol = 1e-10;

struct SmileSolution {
  double k_star = 0.0;
  Estimate atmi;
  double k_hat = 0.0;
  Estimate zviv;
  int iterations = 0;
  double residual = 0.0;  // |d2(k_hat, I(k_hat))|
};

/// Implied volatility of a Monte Carlo price with delta-method standard error
/// s.e.(price) / vega.
inline Estimate implied_vol_estimate(const Estimate& price, double x, double k, double tau) {
  const double iv = implied_vol(price.value, x, k, tau);
  const double vega = bs_vega({x, k, tau, iv});
  return {iv, price.std_error / vega, price.n};
}

inline Estimate atmi(const PathBatch& batch, double rho) {
  const double x0 = batch.params().x0;
  return implied_vol_estimate(mixing_call_price(batch, rho, x0), x0, x0, batch.horizon());
}

/// Solves d2(k, I(k)) = 0 for the zero-vanna log strike. The bracket starts at
/// the flat-smile guess x0 - I(x0)^2 T / 2 and doubles until g changes sign,
/// never leaving x0 +/- 6 sigma0 sqrt(T).
inline SmileSolution zero_vanna(const PathBatch& batch, double rho) {
  const double x0 = batch.params().x0;
  const double T = batch.horizon();
  const double sqT = std::sqrt(T);

  SmileSolution sol;
  sol.k_star = x0;
  sol.atmi = atmi(batch, rho);

  int evaluations = 0;
  auto g = [&](double k) {
    ++evaluations;
    const double iv = implied_vol(mixing_call_price(batch, rho, k).value, x0, k, T);
    return d1d2({x0, k, T, iv}).d2;
  };

  const double limit = 6.0 * batch.params().sigma0 * sqT;
  const double lo_limit = x0 - limit;
  const double hi_limit = x0 + limit;
  const double guess = std::clamp(x0 - 0.5 * sol.atmi.value * sol.atmi.value * T, lo_limit, hi_limit);

  double width = 0.05 * batch.params().sigma0 * sqT;
  double a = std::max(guess - width, lo_limit);
  double b = std::min(guess + width, hi_limit);
  double ga = g(a);
  double gb = g(b);
  while (ga * gb > 0.0) {
    if (a == lo_limit && b == hi_limit) {
      throw BracketFailure("zero_vanna: no sign change of d2 within x0 +/- 6 sigma0 sqrt(T) (rho=" +
                           std::to_string(rho) + ")");
    }
    width *= 2.0;
    const double na = std::max(guess - width, lo_limit);
    const double nb = std::min(guess + width, hi_limit);
    if (na != a) {
      a = na;
      ga = g(a);
    }
    if (nb != b) {
      b = nb;
      gb = g(b);
    }
  }

  double k_hat;
  if (ga == 0.0) {
    k_hat = a;
  } else if (gb == 0.0) {
    k_hat = b;
  } else {
    std::uintmax_t max_iter = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        g, a, b, ga, gb, boost::math::tools::eps_tolerance<double>(52), max_iter);
    const double glo = g(lo);
    const double ghi = g(hi);
    k_hat = std::abs(glo) <= std::abs(ghi) ? lo : hi;
  }

  const Estimate price = mixing_call_price(batch, rho, k_hat);
  sol.k_hat = k_hat;
  sol.zviv = implied_vol_estimate(price, x0, k_hat, T);
  sol.residual = std::abs(d1d2({x0, k_hat, T, sol.zviv.value}).d2);
  sol.iterations = evaluations;
  if (!(sol.residual <= kZeroVannaResidualTol)) {
    throw NoConvergence("zero_vanna: residual " + std::to_string(sol.residual) + " above 1e-10");
  }
  return sol;
}

}  // namespace volbound
