#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "volbound/gauss_bs.hpp"

using namespace volbound;
using Catch::Approx;

TEST_CASE("normal_cdf matches the 50-digit series oracle", "[gauss_bs]") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(std::abs(normal_cdf(0.1) - oracle::normal_cdf(0.1)) <= 1e-15);
  CHECK(normal_cdf(0.1) == Approx(0.539827837277029).epsilon(1e-14));
  CHECK(normal_cdf(-1.7) + normal_cdf(1.7) == Approx(1.0).epsilon(1e-15));

  double worst = 0.0;
  for (double z = -8.0; z <= 8.0; z += 0.01) {
    worst = std::max(worst, std::abs(normal_cdf(z) - oracle::normal_cdf(z)));
  }
  CHECK(worst <= 1e-14);
}

TEST_CASE("d1d2 identities", "[gauss_bs]") {
  const auto atm = d1d2({0.0, 0.0, 1.0, 0.3});
  CHECK(atm.d2 == Approx(-0.15).margin(1e-15));

  CHECK(d1d2({0.0, -0.045, 1.0, 0.3}).d2 == Approx(0.0).margin(1e-15));

  const BsQuote q{0.0, 0.1, 0.25, 0.2};
  const auto d = d1d2(q);
  CHECK(d.d1 - d.d2 == Approx(0.2 * 0.5).margin(1e-15));

  // d1 d2 = (x-k)^2 / (sigma^2 tau) - sigma^2 tau / 4
  for (double x : {-0.3, 0.0, 0.2}) {
    for (double k : {-0.5, 0.0, 0.4}) {
      for (double s : {0.05, 0.3, 1.2}) {
        for (double tau : {0.1, 1.0}) {
          const auto dd = d1d2({x, k, tau, s});
          const double rhs = (x - k) * (x - k) / (s * s * tau) - s * s * tau / 4.0;
          CHECK(dd.d1 * dd.d2 == Approx(rhs).margin(1e-12).epsilon(1e-12));
        }
      }
    }
  }

  CHECK_THROWS_AS(d1d2({0.0, 0.0, 1.0, 0.0}), std::domain_error);
}

TEST_CASE("bs_call values and limits", "[gauss_bs]") {
  const double expected = 2.0 * oracle::normal_cdf(0.1) - 1.0;
  CHECK(bs_call({0.0, 0.0, 1.0, 0.2}) == Approx(expected).epsilon(1e-14));
  CHECK(expected == Approx(0.0796557).margin(1e-7));

  CHECK(bs_call({0.0, -0.1, 1.0, 0.0}) == Approx(1.0 - std::exp(-0.1)).epsilon(1e-15));
  CHECK(bs_call({0.0, 0.1, 1.0, 0.0}) == 0.0);
  CHECK(bs_call({0.0, -40.0, 1.0, 0.2}) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("bs_call bounds and monotonicity on a grid", "[gauss_bs]") {
  for (double tau : {0.05, 0.5, 2.0}) {
    for (double s = 0.05; s < 2.0; s += 0.15) {
      double prev = std::numeric_limits<double>::infinity();
      for (double k = -1.0; k <= 1.0; k += 0.1) {
        const double c = bs_call({0.0, k, tau, s});
        const double ulps = 4.0 * std::numeric_limits<double>::epsilon();
        CHECK(c >= std::max(1.0 - std::exp(k), 0.0) - ulps);
        CHECK(c < 1.0);
        CHECK(c <= prev + ulps);
        prev = c;
        CHECK(bs_call({0.0, k, tau, s + 0.01}) >= c - ulps);
        // Strict inequalities once the time value is visible in double precision.
        if (std::abs(k) < 5.0 * s * std::sqrt(tau)) {
          CHECK(c > std::max(1.0 - std::exp(k), 0.0));
          CHECK(bs_call({0.0, k, tau, s + 0.01}) > c);
        }
      }
    }
  }
}

TEST_CASE("bs_vega", "[gauss_bs]") {
  CHECK(bs_vega({0.0, 0.0, 1.0, 0.2}) == Approx(oracle::normal_pdf(0.1)).epsilon(1e-14));
  CHECK(oracle::normal_pdf(0.1) == Approx(0.3969525).margin(1e-7));
  CHECK(bs_vega({0.3, -0.2, 0.5, 0.4}) > 0.0);
  CHECK(bs_vega({0.0, 0.0, 1.0, 80.0}) < 1e-100);
}

TEST_CASE("implied_vol inverts bs_call", "[gauss_bs]") {
  const BsQuote q{0.0, 0.05, 0.5, 0.3};
  CHECK(implied_vol(bs_call(q), q.x, q.k, q.tau) == Approx(0.3).margin(1e-10));
  CHECK(implied_vol(0.0796557, 0.0, 0.0, 1.0) == Approx(0.2).margin(1e-6));

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double sigma = 0.01 + 2.99 * U(rng);
    const double tau = 0.01 + 1.99 * U(rng);
    const double x = U(rng) - 0.5;
    const double k = x + (2.0 * U(rng) - 1.0) * 2.0 * sigma * std::sqrt(tau);
    const double iv = implied_vol(bs_call({x, k, tau, sigma}), x, k, tau);
    worst = std::max(worst, std::abs(iv - sigma));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("implied_vol rejects prices outside the arbitrage band", "[gauss_bs]") {
  CHECK_THROWS_AS(implied_vol(1.0, 0.0, 0.0, 1.0), OutOfBounds);
  CHECK_THROWS_AS(implied_vol(0.09, 0.0, -0.1, 1.0), OutOfBounds);  // below intrinsic 0.0952
  CHECK_THROWS_AS(implied_vol(0.0, 0.0, 0.1, 1.0), OutOfBounds);
  // Needs sigma > 5.
  CHECK_THROWS_AS(implied_vol(bs_call({0.0, 0.0, 1.0, 6.0}), 0.0, 0.0, 1.0), OutOfBounds);
}
