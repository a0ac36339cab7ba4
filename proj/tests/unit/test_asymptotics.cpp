#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ruin/asymptotics.hpp"
#include "ruin/cli.hpp"
#include "ruin/gauss_constants.hpp"

using namespace ruin;

namespace {

ModelParams finite(double u, double delta, double gamma, double T, double c = 0.1, double sigma = 1.0) {
  return {u, c, sigma, delta, gamma, Horizon::finite(T)};
}

ModelParams infinite(double u, double delta, double gamma, double c = 0.1, double sigma = 1.0) {
  return {u, c, sigma, delta, gamma, Horizon::infinite()};
}

// Direct long-double transcription of the finite-horizon formula, with the
// exponentials written out instead of the expm1 kernel.
long double finite_oracle(long double u, long double c, long double sigma, long double delta,
                          long double gamma, long double T) {
  const long double e2 = std::exp(-2 * delta * T);
  const long double a = std::sqrt(sigma * sigma / (2 * delta) * (1 - e2));
  const long double arg = (u + c / delta * (1 - std::exp(-delta * T))) / a;
  return 2 * (1 + e2) / (1 - gamma + e2) * 0.5L * std::erfc(arg / std::sqrt(2.0L));
}

}  // namespace

TEST_CASE("finite horizon: first reference row") {
  const auto a = finite_horizon_ruin_asymptotic(finite(5, 0.05, 0.1, 20));
  CHECK(std::abs(a.value - 0.0363) < 1e-4);
  CHECK(a.log_value == doctest::Approx(std::log(a.value)).epsilon(1e-14));
}

TEST_CASE("finite horizon: positive-interest reference rows") {
  for (const auto& r : finite_horizon_table()) {
    if (r.delta < 0) continue;
    const auto a = finite_horizon_ruin_asymptotic(finite(r.u, r.delta, r.gamma, r.T, r.c, r.sigma));
    CHECK(std::abs(a.value - r.reference) < 1e-4);
  }
}

TEST_CASE("finite horizon matches a direct long-double evaluation for both signs of delta") {
  for (const auto& r : finite_horizon_table()) {
    const auto a = finite_horizon_ruin_asymptotic(finite(r.u, r.delta, r.gamma, r.T, r.c, r.sigma));
    const double ref = static_cast<double>(finite_oracle(r.u, r.c, r.sigma, r.delta, r.gamma, r.T));
    CHECK(a.value == doctest::Approx(ref).epsilon(1e-13));
  }
}

TEST_CASE("finite horizon quantities") {
  const auto q = finite_horizon_quantities(finite(5, 0.05, 0.1, 20));
  CHECK(q.a_sq == doctest::Approx(8.646647167633873).epsilon(1e-14));
  CHECK(q.rate_lambda == doctest::Approx(std::exp(-2.0) / (2 * 8.646647167633873)).epsilon(1e-14));
  CHECK(q.rate_lambda == doctest::Approx(0.0078259).epsilon(1e-4));
  const auto qn = finite_horizon_quantities(finite(5, -0.05, 0.2, 20));
  CHECK(qn.a_sq > 0.0);
}

TEST_CASE("prefactor is exactly 2 without tax") {
  for (double delta : {-0.1, 0.05, 0.3}) {
    const auto p = finite(4, delta, 0.0, 10);
    const auto q = finite_horizon_quantities(p);
    CHECK(q.prefactor == 2.0);
    CHECK(finite_horizon_ruin_asymptotic(p).value == 2.0 * normal_survival(q.psi_arg));
  }
}

TEST_CASE("prefactor bounds") {
  for (double gamma : {0.01, 0.3, 0.9}) {
    const auto q = finite_horizon_quantities(finite(4, 0.07, gamma, 15));
    const double e2 = std::exp(-2 * 0.07 * 15);
    CHECK(q.prefactor > 2.0);
    CHECK(q.prefactor < 2 * (1 + e2) / e2);
  }
}

TEST_CASE("finite horizon is increasing in gamma") {
  for (double delta : {-0.07, 0.05}) {
    double prev = 0.0;
    for (double gamma = 0.0; gamma < 0.95; gamma += 0.05) {
      const double v = finite_horizon_ruin_asymptotic(finite(5, delta, gamma, 20)).value;
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("finite horizon rejects zero interest") {
  CHECK_THROWS_WITH_AS(finite_horizon_ruin_asymptotic(finite(5, 0.0, 0.1, 20)),
                       doctest::Contains("zero_interest_ruin_probability"), std::domain_error);
  CHECK_THROWS_AS(finite_horizon_ruin_asymptotic(finite(5, 1e-13, 0.1, 20)), std::domain_error);
}

TEST_CASE("finite horizon log form survives underflow") {
  const auto a = finite_horizon_ruin_asymptotic(finite(500, 0.05, 0.1, 20));
  CHECK(a.value == 0.0);
  CHECK(std::isfinite(a.log_value));
  CHECK(a.log_value < -1e4);
}

TEST_CASE("infinite horizon: first reference row with a given constant") {
  const auto a = infinite_horizon_ruin_asymptotic(infinite(5, 0.05, 0.1), 2.480);
  CHECK(a.value == doctest::Approx(0.0467).epsilon(1e-3));
  CHECK(std::abs(a.value - 0.0467) < 1e-4);
}

TEST_CASE("infinite horizon: gamma ratio within a parameter set") {
  const double phat = 2.7;
  const double v1 = infinite_horizon_ruin_asymptotic(infinite(5, 0.05, 0.1), phat).value;
  const double v2 = infinite_horizon_ruin_asymptotic(infinite(5, 0.05, 0.2), phat).value;
  CHECK(v2 / v1 == doctest::Approx(0.9 / 0.8).epsilon(1e-14));
  CHECK(0.0526 / 0.0467 == doctest::Approx(1.125).epsilon(2e-3));
}

TEST_CASE("infinite horizon without tax is phat times Psi") {
  const auto p = infinite(5, 0.05, 0.0);
  const double m = std::numbers::sqrt2 * std::sqrt(0.05 * 25 + 2 * 0.1 * 5);
  CHECK(infinite_horizon_ruin_asymptotic(p, 3.0).value == doctest::Approx(3.0 * normal_survival(m)).epsilon(1e-14));
}

TEST_CASE("infinite horizon is increasing in gamma at fixed constant") {
  double prev = 0.0;
  for (double gamma = 0.0; gamma < 0.95; gamma += 0.1) {
    const double v = infinite_horizon_ruin_asymptotic(infinite(5, 0.07, gamma), 2.9).value;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("infinite horizon rejects non-positive interest") {
  CHECK_THROWS_WITH_AS(infinite_horizon_ruin_asymptotic(infinite(5, -0.05, 0.1), 2.5),
                       doctest::Contains("ruin is certain"), std::domain_error);
  CHECK_THROWS_AS(infinite_horizon_ruin_asymptotic(infinite(5, 0.0, 0.1), 2.5), std::domain_error);
  CHECK_THROWS_AS(infinite_horizon_ruin_asymptotic(finite(5, 0.05, 0.1, 20), 2.5), std::invalid_argument);
  CHECK_THROWS_AS(infinite_horizon_ruin_asymptotic(infinite(5, 0.05, 0.1), 0.0), std::invalid_argument);
}

TEST_CASE("zero-interest closed form") {
  for (int kappa : {1, 2}) {
    for (double gamma : {0.0, 0.3, 0.9}) CHECK(zero_interest_ruin_probability(0.0, 1, 1, gamma, kappa) == 1.0);
    CHECK(zero_interest_ruin_probability(1.3, 0.7, 1.1, 0.0, kappa) ==
          doctest::Approx(std::exp(-kappa * 0.7 * 1.3 / 1.21)).epsilon(1e-14));
  }
  CHECK(zero_interest_ruin_probability(1, 1, 1, 0.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(kDefaultExponentFactor == 2);
  CHECK(zero_interest_ruin_probability(1, 1, 1, 0.1) ==
        doctest::Approx(1 - std::pow(1 - std::exp(-2.0), 1 / 0.9)).epsilon(1e-14));
  CHECK_THROWS_AS(zero_interest_ruin_probability(1, 1, 1, 0.1, 3), std::invalid_argument);
  CHECK_THROWS_AS(zero_interest_ruin_probability(1, 1, 1, 1.0), std::invalid_argument);
}

TEST_CASE("zero-interest closed form monotonicity") {
  for (int kappa : {1, 2}) {
    double prev = 2.0;
    for (double u = 0.0; u < 30; u += 0.5) {
      const double v = zero_interest_ruin_probability(u, 0.5, 1.2, 0.2, kappa);
      CHECK(v < prev);
      prev = v;
    }
    CHECK(prev < 1e-4);
    prev = 0.0;
    for (double gamma = 0.0; gamma < 0.95; gamma += 0.05) {
      const double v = zero_interest_ruin_probability(2.0, 0.5, 1.2, gamma, kappa);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("finite-horizon ruin-time tail") {
  const auto p = finite(5, 0.05, 0.1, 20);
  const double lambda = finite_horizon_quantities(p).rate_lambda;
  CHECK(finite_horizon_ruin_time_tail(0.0, p) == 1.0);
  CHECK(finite_horizon_ruin_time_tail(std::log(2.0) / lambda, p) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(finite_horizon_ruin_time_tail(10.0, p) == doctest::Approx(std::exp(-0.078259)).epsilon(1e-5));
  CHECK(finite_horizon_ruin_time_tail(10.0, p) == doctest::Approx(0.92473).epsilon(1e-5));
  double prev = 1.0;
  for (double x = 1.0; x < 5000; x *= 1.5) {
    const double v = finite_horizon_ruin_time_tail(x, p);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-6);
  CHECK_THROWS_AS(finite_horizon_ruin_time_tail(-1.0, p), std::invalid_argument);
}

TEST_CASE("infinite-horizon ruin-time law") {
  const auto p = infinite(5, 0.05, 0.1);
  const double root_b = 0.1 / std::sqrt(0.05);
  CHECK(ruin_time_interval_end(-root_b, p) == doctest::Approx(0.0).scale(1.0));
  CHECK(infinite_horizon_ruin_time_cdf(50.0, p, 2.48, 2.48) == 1.0);
  const double boundary = infinite_horizon_ruin_time_cdf(-root_b + 1e-15, p, std::exp(-0.2), 2.48);
  CHECK(boundary == doctest::Approx(0.330).epsilon(2e-3));
  CHECK_THROWS_AS(infinite_horizon_ruin_time_cdf(-root_b - 0.1, p, 1.0, 2.48), std::invalid_argument);
  CHECK_THROWS_AS(infinite_horizon_ruin_time_cdf(1.0, p, 3.0, 2.48), std::invalid_argument);
  CHECK_THROWS_AS(infinite_horizon_ruin_time_cdf(1.0, infinite(5, -0.05, 0.1), 1.0, 2.0), std::domain_error);
}

TEST_CASE("t_u") {
  CHECK(t_u(infinite(5, 0.05, 0.1)) == doctest::Approx(std::pow(0.1 / 0.35, 2)).epsilon(1e-15));
  CHECK(t_u(infinite(5, 0.05, 0.1)) == doctest::Approx(0.0816327).epsilon(1e-6));
  CHECK(t_u(infinite(0, 0.05, 0.1)) == 1.0);
  double prev = 1.0;
  for (double u : {1e1, 1e2, 1e3, 1e4, 1e6}) {
    const double t = t_u(infinite(u, 0.05, 0.1));
    CHECK(t < prev);
    CHECK(t > 0.0);
    prev = t;
  }
  CHECK(t_u(infinite(1e7, 0.05, 0.1)) * 1e14 == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(infinite_horizon_quantities(infinite(5, 0.05, 0.1)).b == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(infinite_horizon_quantities(infinite(5, 0.05, 0.1)).m_u == doctest::Approx(2.121320).epsilon(1e-6));
}

TEST_CASE("alternative form argument decreases the Psi factor in delta") {
  const double c = 0.1, sigma = 1.0;
  for (double u : {5.0, 20.0}) {
    double prev = 0.0;
    for (double delta = 0.05; delta < 0.5; delta += 0.01) {
      if (u < c / (std::numbers::sqrt2 * delta)) continue;
      const double arg = std::numbers::sqrt2 * (delta * u + c) / (sigma * std::sqrt(delta));
      CHECK(arg > prev);
      prev = arg;
    }
  }
}

TEST_CASE("equivalent infinite-horizon forms agree for large u on common paths") {
  EstimatorConfig cfg;
  cfg.n_paths = 2000;
  cfg.step = 0.02;
  const auto pair = estimate_pair_phat_ptilde(0.2, cfg);
  const auto p = infinite(1e3, 0.05, 0.1);
  const auto [lhs, rhs] = equivalent_infinite_horizon_forms(p, pair.phat.value.estimate, pair.ptilde.value.estimate);
  CHECK(std::abs(std::exp(lhs.log_value - rhs.log_value) - 1.0) < 0.01);
  const auto [l5, r5] = equivalent_infinite_horizon_forms(infinite(5, 0.05, 0.1), pair.phat.value.estimate,
                                                          pair.ptilde.value.estimate);
  CHECK(std::abs(std::exp(lhs.log_value - rhs.log_value) - 1.0) <
        std::abs(std::exp(l5.log_value - r5.log_value) - 1.0));
}
