#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>

#include "volbound/asymptotics.hpp"
#include "volbound/mc_engine.hpp"

using namespace volbound;
using Catch::Approx;

TEST_CASE("volswap_strike", "[mc]") {
  SECTION("deterministic volatility") {
    const auto b = simulate_paths({0.3, 1e-12}, 1.0, 16, 5000, 1);
    const auto e = volswap_strike(b);
    CHECK(e.value == Approx(0.3).epsilon(1e-12));
    CHECK(e.n == 5000);
  }
  SECTION("Jensen bound against the closed-form variance") {
    const SabrParams p{0.3, 0.5};
    const auto b = simulate_paths(p, 0.5, 64, 200000, 2);
    const auto e = volswap_strike(b);
    CHECK(e.value <= std::sqrt(expected_integrated_variance(p, 0.5) / 0.5) + 3.0 * e.std_error);
    CHECK(e.std_error > 0.0);
  }
}

TEST_CASE("mixing_call_price reductions", "[mc]") {
  const SabrParams p{0.3, 0.5};
  const auto b = simulate_paths(p, 0.5, 32, 20000, 3);

  SECTION("rho = 0 averages Black-Scholes prices at the realised volatility") {
    MomentAccumulator acc;
    for (double y : b.integrated_variance()) acc.add(bs_call({0.0, 0.1, 0.5, std::sqrt(y / 0.5)}));
    CHECK(mixing_call_price(b, 0.0, 0.1).value == Approx(acc.estimate().value).epsilon(1e-13));
  }
  SECTION("constant volatility gives the Black-Scholes price") {
    const auto flat = simulate_paths({0.3, 1e-12}, 0.5, 16, 20000, 4);
    const double bs = bs_call({0.0, 0.05, 0.5, 0.3});
    CHECK(mixing_call_price(flat, 0.0, 0.05).value == Approx(bs).epsilon(1e-9));
    // With correlation the conditional spot still carries rho sigma0 W_T, so
    // only the expectation matches.
    for (double rho : {-1.0, -0.5, 0.7, 1.0}) {
      const auto e = mixing_call_price(flat, rho, 0.05);
      CHECK(std::abs(e.value - bs) <= 4.0 * e.std_error);
    }
  }
  SECTION("arbitrage bounds and monotone in strike") {
    for (double rho : {-1.0, -0.7, 0.0, 0.4, 1.0}) {
      double prev = std::numeric_limits<double>::infinity();
      for (double k = -0.6; k <= 0.6; k += 0.1) {
        const auto e = mixing_call_price(b, rho, k);
        CHECK(e.value >= std::max(1.0 - std::exp(k), 0.0) - 3.0 * e.std_error);
        CHECK(e.value <= 1.0 + 3.0 * e.std_error);
        CHECK(e.value <= prev);
        if (prev > 0.0) CHECK((e.value < prev || e.value == 0.0));
        prev = e.value;
      }
    }
  }
  SECTION("rejects |rho| > 1") { CHECK_THROWS_AS(mixing_call_price(b, 1.5, 0.0), InvalidConfig); }
}

TEST_CASE("estimators are identical under any worker count", "[mc]") {
  const auto b = simulate_paths({0.3, 1.0}, 1.0, 8, 3 * kChunkSize + 5, 8);
  ::setenv("VOLBOUND_THREADS", "1", 1);
  const auto a1 = mixing_call_price(b, -0.3, 0.02);
  const auto v1 = volswap_strike(b);
  ::setenv("VOLBOUND_THREADS", "3", 1);
  const auto a2 = mixing_call_price(b, -0.3, 0.02);
  const auto v2 = volswap_strike(b);
  ::unsetenv("VOLBOUND_THREADS");
  CHECK(a1.value == a2.value);
  CHECK(a1.std_error == a2.std_error);
  CHECK(v1.value == v2.value);
}

TEST_CASE("Euler oracle", "[mc]") {
  SECTION("Black-Scholes limit") {
    const auto e = euler_oracle_price({0.2, 1e-12, 0.0, 0.0}, 1.0, 0.0, 32, 100000, 5);
    CHECK(std::abs(e.value - 0.0796557) <= 3.0 * e.std_error);
  }
  SECTION("agrees with the mixing estimator") {
    for (double rho : {0.0, -0.7}) {
      const SabrParams p{0.3, 0.5, rho, 0.0};
      const auto euler = euler_oracle_price(p, 0.5, 0.0, 128, 100000, 6);
      const auto b = simulate_paths(p, 0.5, 128, 100000, 6);
      const auto mix = mixing_call_price(b, rho, 0.0);
      CHECK(std::abs(euler.value - mix.value) <= 3.0 * combined_se(euler, mix));
    }
  }
  SECTION("worthless far out of the money") {
    const auto e = euler_oracle_price({0.3, 0.5, -0.3, 0.0}, 0.5, 8.0, 16, 2000, 7);
    CHECK(e.value == Approx(0.0).margin(1e-12));
  }
  SECTION("validates sizes") {
    CHECK_THROWS_AS(euler_oracle_price({0.3, 0.5}, 0.5, 0.0, 0, 10, 1), InvalidConfig);
    CHECK_THROWS_AS(euler_oracle_price({0.3, 0.5}, 0.5, 0.0, 10, 0, 1), InvalidConfig);
  }
}

TEST_CASE("Malliavin functionals", "[mc]") {
  SECTION("needs full paths") {
    const auto b = simulate_paths({0.3, 0.5}, 1.0, 8, 10, 1);
    CHECK_THROWS_AS(malliavin_functionals(b), MissingPaths);
  }
  SECTION("vanish as alpha -> 0") {
    const auto b = simulate_paths({0.3, 1e-12}, 1.0, 64, 100, 1, PathStorage::full);
    const auto m = malliavin_functionals(b);
    CHECK(std::abs(m.t1.value) < 1e-20);
    CHECK(std::abs(m.t2.value) < 1e-20);
    CHECK(std::abs(m.t3.value) < 1e-20);
    CHECK(std::abs(m.t4.value) < 1e-10);
  }
  SECTION("constant path values match the triple integrals") {
    // sigma constant: T4 = alpha s^2 T^2, T2 = alpha^2 s^3 T^3 / 3, T3 = 2 alpha^2 s^2 T^3 / 3.
    std::vector<double> path(257, 0.4);
    const double T = 0.8;
    const auto v = malliavin_path_values({path, T / 256.0, 0.5});
    CHECK(v[3] == Approx(0.5 * 0.16 * T * T).epsilon(1e-12));
    CHECK(v[0] == Approx(v[3] * v[3]).epsilon(1e-12));
    // Nested trapezoid sums carry an O(steps^-2) bias.
    CHECK(v[1] == Approx(0.25 * 0.064 * T * T * T / 3.0).epsilon(1e-4));
    CHECK(v[2] == Approx(2.0 * 0.25 * 0.16 * T * T * T / 3.0).epsilon(1e-4));
  }
  SECTION("estimates agree with the closed forms") {
    const double a = 0.5, s0 = 0.3, T = 1.0;
    const auto b = simulate_paths({s0, a}, T, 256, 20000, 12, PathStorage::full);
    const auto m = malliavin_functionals(b);
    CHECK(std::abs(m.t4.value - t4_exact(a, s0, T)) <= 3.0 * m.t4.std_error);
    CHECK(t4_exact(a, s0, T) == Approx(0.0532526).margin(1e-7));
    CHECK(std::abs(m.t2.value - t2_exact(a, s0, T)) <= 3.0 * m.t2.std_error);
    CHECK(std::abs(m.t3.value - t3_exact(a, s0, T)) <= 3.0 * m.t3.std_error);
    CHECK(m.t1.value <= t1_bound(a, s0, T) + 3.0 * m.t1.std_error);
  }
}
