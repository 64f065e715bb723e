#pragma once

// Closed-form expectations of the Malliavin functionals T1..T4 for lognormal
// SABR at t = 0, their leading short-maturity terms, and the slope and
// curvature limits assembled from them.
//
// Each closed form is written as prefactor * T^m * h(alpha^2 T). For small
// exponent arguments h is summed from its power series; the direct expression
// loses digits to the 1/alpha^6 cancellation there.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "volbound/errors.hpp"
#include "volbound/sabr.hpp"

namespace volbound {

namespace detail {

inline constexpr int kSeriesTerms = 40;

// sum_{m>=first} coef(m, 1/m!) x^(m-first), with inv_fact(m) = 1/m!.
template <class Coef>
double power_series(double x, int first, Coef&& coef) {
  double inv_fact = 1.0;
  for (int m = 1; m <= first; ++m) inv_fact /= m;
  double sum = 0.0;
  double xp = 1.0;
  for (int m = first; m < first + kSeriesTerms; ++m) {
    const double term = coef(m, inv_fact) * xp;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    xp *= x;
    inv_fact /= (m + 1);
  }
  return sum;
}

inline void require_positive(double alpha, double sigma0, double T, const char* who) {
  if (!(alpha > 0.0) || !(sigma0 > 0.0) || !(T > 0.0)) {
    throw std::domain_error(std::string(who) + ": alpha, sigma0 and T must be positive");
  }
}

}  // namespace detail

/// Schwarz upper bound for T1 = E[(int_0^T int_s^T D_s sigma_r^2 dr ds)^2]:
/// T int_0^T (T-s) int_s^T 4 alpha^2 sigma0^4 e^{6 alpha^2 r} dr ds.
inline double t1_bound(double alpha, double sigma0, double T) {
  detail::require_positive(alpha, sigma0, T, "t1_bound");
  const double a2 = alpha * alpha;
  const double pre = 4.0 * a2 * std::pow(sigma0, 4);
  const double b = 6.0 * a2 * T;
  if (b < 1.0) {
    // h(b) = [b^2 e^b / 2 + b - (e^b - 1)] / b^3
    const double h = detail::power_series(b, 3, [](int m, double inv_fact) {
      return 0.5 * inv_fact * m * (m - 1) - inv_fact;
    });
    return pre * std::pow(T, 4) * h;
  }
  const double e6 = std::exp(b);
  return pre * (e6 * T * T * T / (12.0 * a2) + T * T / (36.0 * a2 * a2) -
                (e6 - 1.0) * T / (216.0 * a2 * a2 * a2));
}

/// E[int int int_{s<r<u} D_s sigma_r D_r sigma_u^2] = 2 alpha^2 sigma0^3 int e^{alpha^2 u + 2 alpha^2 r}.
inline double t2_exact(double alpha, double sigma0, double T) {
  detail::require_positive(alpha, sigma0, T, "t2_exact");
  const double a2 = alpha * alpha;
  const double pre = 2.0 * a2 * std::pow(sigma0, 3);
  const double c = a2 * T;
  if (3.0 * c < 1.0) {
    // h(c) = [c e^{3c}/6 - (e^{3c} - e^c)/4 + (e^{3c} - 1)/9] / c^3
    const double h = detail::power_series(c, 3, [](int m, double inv_fact) {
      const double p3 = std::pow(3.0, m);
      return inv_fact * (p3 * m / 18.0 - (p3 - 1.0) / 4.0 + p3 / 9.0);
    });
    return pre * T * T * T * h;
  }
  const double e1 = std::exp(c);
  const double e3 = std::exp(3.0 * c);
  const double a4 = a2 * a2;
  const double a6 = a4 * a2;
  return pre * (e3 * T / (2.0 * a4) - (e3 - e1) / (4.0 * a6) - e3 * T / (3.0 * a4) +
                (e3 - 1.0) / (9.0 * a6));
}

/// E[int int int_{s<r<u} D_s D_r sigma_u^2] = 4 alpha^2 sigma0^2 int e^{alpha^2 u}.
inline double t3_exact(double alpha, double sigma0, double T) {
  detail::require_positive(alpha, sigma0, T, "t3_exact");
  const double a2 = alpha * alpha;
  const double pre = 4.0 * a2 * sigma0 * sigma0;
  const double c = a2 * T;
  if (c < 1.0) {
    // h(c) = [c^2 e^c / 2 - c e^c + e^c - 1] / c^3
    const double h = detail::power_series(c, 3, [](int m, double inv_fact) {
      return inv_fact * (0.5 * m * (m - 1) - m + 1.0);
    });
    return pre * T * T * T * h;
  }
  const double e1 = std::exp(c);
  return pre * (e1 * T * T / (2.0 * a2) - e1 * T / (a2 * a2) + (e1 - 1.0) / (a2 * a2 * a2));
}

/// E[int_0^T int_s^T D_s sigma_r^2 dr ds] = 2 alpha sigma0^2 int int e^{alpha^2 r}.
inline double t4_exact(double alpha, double sigma0, double T) {
  detail::require_positive(alpha, sigma0, T, "t4_exact");
  const double a2 = alpha * alpha;
  const double pre = 2.0 * alpha * sigma0 * sigma0;
  const double c = a2 * T;
  if (c < 1.0) {
    // h(c) = [c e^c - (e^c - 1)] / c^2
    const double h = detail::power_series(c, 2, [](int m, double inv_fact) {
      return inv_fact * (m - 1);
    });
    return pre * T * T * h;
  }
  const double e1 = std::exp(c);
  return pre * (e1 * T / a2 - (e1 - 1.0) / (a2 * a2));
}

inline double t1_leading(double alpha, double sigma0, double T) {
  return 4.0 * alpha * alpha * std::pow(sigma0, 4) / 3.0 * std::pow(T, 4);
}
inline double t2_leading(double alpha, double sigma0, double T) {
  return alpha * alpha * std::pow(sigma0, 3) / 3.0 * T * T * T;
}
inline double t3_leading(double alpha, double sigma0, double T) {
  return 2.0 * alpha * alpha * sigma0 * sigma0 / 3.0 * T * T * T;
}
// int_0^T int_s^T 2 alpha sigma0^2 dr ds.
inline double t4_leading(double alpha, double sigma0, double T) {
  return alpha * sigma0 * sigma0 * T * T;
}

/// The four contributions to lim (ATMI - E[v]) / T, built from the leading
/// terms (T1 through its Schwarz bound, so the sum is an upper bound).
struct SlopeTerms {
  double t1_term;
  double t2_term;
  double t3_term;
  double t4_term;

  double rho_squared_part() const noexcept { return t1_term + t2_term + t3_term; }
  double total() const noexcept { return rho_squared_part() + t4_term; }
};

inline SlopeTerms slope_terms(double rho, double alpha, double sigma0) {
  const double r2 = rho * rho;
  const double s = sigma0;
  return {3.0 * r2 / (8.0 * s * s * s) * t1_leading(alpha, s, 1.0),
          -r2 / (2.0 * s * s) * t2_leading(alpha, s, 1.0),
          -r2 / (2.0 * s) * t3_leading(alpha, s, 1.0),
          rho / 4.0 * t4_leading(alpha, s, 1.0)};
}

/// Upper bound for lim_{T->0} (ATMI - E[v]) / T: the rho^2 terms cancel and
/// rho alpha sigma0^2 / 4 remains. Negative for rho < 0.
inline double atmi_slope_bound(double rho, double alpha, double sigma0) {
  return rho * alpha * sigma0 * sigma0 / 4.0;
}

/// Upper bound for lim_{T->0} (ZVIV - E[v]) / T, for every rho.
inline constexpr double zviv_slope_limit() noexcept { return 0.0; }

/// lim_{T->0} (ATMI - E[v]) / T^2 at rho = 0:
/// -(1/(32 sigma0)) * (4 alpha^2 sigma0^4 / 3) = -alpha^2 sigma0^3 / 24.
inline double atmi_curvature_rho0(double alpha, double sigma0) {
  return -alpha * alpha * sigma0 * sigma0 * sigma0 / 24.0;
}

/// Pathwise integrand whose sign decides the zero-correlation ZVIV bound:
///   -(int_s^T 2 alpha sigma^2)(int_r^T 2 alpha sigma^2) / (2 int_{t0}^T sigma^2)
///     + int_{max(r,s)}^T 4 alpha^2 sigma^2,
/// with integrals by the trapezoidal rule on the path grid. Indices must
/// satisfy t0 <= r, s < last grid index.
inline double zviv_bound_integrand(const VolPathView& path, std::size_t r, std::size_t s, std::size_t t0) {
  const std::size_t last = path.sigma.size() == 0 ? 0 : path.sigma.size() - 1;
  if (r >= last || s >= last || t0 > r || t0 > s) {
    throw IndexError("zviv_bound_integrand: need t0 <= r, s < " + std::to_string(last));
  }
  const auto& sig = path.sigma;
  const std::size_t lo = std::min({r, s, t0});
  // tail(j) = int_{t_j}^T sigma^2 for j >= lo.
  std::vector<double> tail(last + 1 - lo);
  tail.back() = 0.0;
  for (std::size_t j = last; j-- > lo;) {
    tail[j - lo] = tail[j + 1 - lo] + 0.5 * path.dt * (sig[j] * sig[j] + sig[j + 1] * sig[j + 1]);
  }
  const double a = path.alpha;
  const double tail_s = tail[s - lo];
  const double tail_r = tail[r - lo];
  const double tail_t0 = tail[t0 - lo];
  const double tail_max = tail[std::max(r, s) - lo];
  return -(2.0 * a * tail_s) * (2.0 * a * tail_r) / (2.0 * tail_t0) + 4.0 * a * a * tail_max;
}

struct AsymptoticReport {
  double t1_bound;
  double t2;
  double t3;
  double t4;
  double t1_leading;
  double t2_leading;
  double t3_leading;
  double t4_leading;
  double atmi_slope_bound;
  double zviv_slope_bound;
  double atmi_curvature_rho0;
};

inline AsymptoticReport asymptotic_report(double alpha, double sigma0, double T, double rho) {
  return {volbound::t1_bound(alpha, sigma0, T),
          t2_exact(alpha, sigma0, T),
          t3_exact(alpha, sigma0, T),
          t4_exact(alpha, sigma0, T),
          volbound::t1_leading(alpha, sigma0, T),
          volbound::t2_leading(alpha, sigma0, T),
          volbound::t3_leading(alpha, sigma0, T),
          volbound::t4_leading(alpha, sigma0, T),
          volbound::atmi_slope_bound(rho, alpha, sigma0),
          zviv_slope_limit(),
          volbound::atmi_curvature_rho0(alpha, sigma0)};
}

}  // namespace volbound
