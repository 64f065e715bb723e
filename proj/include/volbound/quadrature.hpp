#pragma once

// Adaptive Gauss-Kronrod (G7/K15) integration, nested for the iterated
// integrals that define the Malliavin closed forms.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace volbound::quadrature {

inline constexpr double kDefaultRelTol = 1e-12;

// Integrates over [0, 1] after an affine change of variable: the Boost error
// floor is not scaled by the interval width, so very short intervals would
// otherwise subdivide to the depth limit.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = kDefaultRelTol) {
  if (a == b) return 0.0;
  const double w = b - a;
  return w * boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                 [&](double t) { return f(a + w * t); }, 0.0, 1.0, 20, rel_tol);
}

/// T int_0^T (T-s) int_s^T 4 alpha^2 sigma0^4 e^{6 alpha^2 r} dr ds.
inline double t1_bound_integral(double alpha, double sigma0, double T) {
  const double a2 = alpha * alpha;
  const double c = 4.0 * a2 * std::pow(sigma0, 4);
  return T * integrate(
                 [&](double s) {
                   return (T - s) * integrate([&](double r) { return c * std::exp(6.0 * a2 * r); }, s, T);
                 },
                 0.0, T);
}

/// int_0^T int_s^T int_r^T 2 alpha^2 sigma0^3 e^{alpha^2 u + 2 alpha^2 r} du dr ds.
inline double t2_integral(double alpha, double sigma0, double T) {
  const double a2 = alpha * alpha;
  const double c = 2.0 * a2 * std::pow(sigma0, 3);
  return integrate(
      [&](double s) {
        return integrate(
            [&](double r) {
              return integrate([&](double u) { return c * std::exp(a2 * u + 2.0 * a2 * r); }, r, T);
            },
            s, T);
      },
      0.0, T);
}

/// int_0^T int_s^T int_r^T 4 alpha^2 sigma0^2 e^{alpha^2 u} du dr ds.
inline double t3_integral(double alpha, double sigma0, double T) {
  const double a2 = alpha * alpha;
  const double c = 4.0 * a2 * sigma0 * sigma0;
  return integrate(
      [&](double s) {
        return integrate(
            [&](double r) { return integrate([&](double u) { return c * std::exp(a2 * u); }, r, T); }, s, T);
      },
      0.0, T);
}

/// int_0^T int_s^T 2 alpha sigma0^2 e^{alpha^2 r} dr ds.
inline double t4_integral(double alpha, double sigma0, double T) {
  const double a2 = alpha * alpha;
  const double c = 2.0 * alpha * sigma0 * sigma0;
  return integrate(
      [&](double s) { return integrate([&](double r) { return c * std::exp(a2 * r); }, s, T); }, 0.0, T);
}

/// (1/T^3) int_0^T E[sigma_r^4] (2 alpha (e^{alpha^2 (T-r)} - 1) / alpha^2)^2 dr: the
/// normalised expectation in the zero-correlation ATMI curvature limit.
inline double curvature_integral(double alpha, double sigma0, double T) {
  const double a2 = alpha * alpha;
  const double s4 = std::pow(sigma0, 4);
  const double v = integrate(
      [&](double r) {
        const double inner = 2.0 * alpha * std::expm1(a2 * (T - r)) / a2;
        return s4 * std::exp(6.0 * a2 * r) * inner * inner;
      },
      0.0, T);
  return v / (T * T * T);
}

}  // namespace volbound::quadrature
