#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "ruin/asymptotics.hpp"
#include "ruin/simulator.hpp"

using namespace ruin;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ModelParams row1() { return {5.0, 0.1, 1.0, 0.05, 0.1, Horizon::finite(20.0)}; }

SimConfig quick(std::size_t n, double step = 0.01) {
  SimConfig cfg;
  cfg.n_paths = n;
  cfg.step = step;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("u = 0 is ruined almost surely and almost at once") {
  ModelParams p{0.0, 0.1, 1.0, 0.05, 0.1, Horizon::finite(1.0)};
  const auto cfg = quick(2000, 0.001);
  const auto est = ruin_probability_mc(p, cfg);
  CHECK(est.estimate >= 0.95);
  const auto samples = ruin_time_samples(p, cfg);
  std::vector<double> taus;
  for (const auto& s : samples)
    if (s.ruined) taus.push_back(*s.tau);
  std::nth_element(taus.begin(), taus.begin() + taus.size() / 2, taus.end());
  CHECK(taus[taus.size() / 2] < 10 * cfg.step);
}

TEST_CASE("ruin times lie inside the horizon and exist only for ruined paths") {
  ModelParams p = row1();
  p.u = 1.0;
  const auto samples = ruin_time_samples(p, quick(2000));
  std::size_t ruined = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    CHECK(s.path_id == i);
    CHECK(s.ruined == s.tau.has_value());
    if (s.tau) {
      ++ruined;
      CHECK(*s.tau > 0.0);
      CHECK(*s.tau <= 20.0 + 1e-12);
    }
  }
  CHECK(ruined > 0);
  CHECK(ruined < samples.size());

  p.u = 50.0;
  for (const auto& s : ruin_time_samples(p, quick(200))) {
    CHECK_FALSE(s.ruined);
    CHECK_FALSE(s.tau.has_value());
  }
}

TEST_CASE("drifted Brownian motion without tax or interest") {
  ModelParams p{1.0, 1.0, 1.0, 0.0, 0.0, Horizon::finite(20.0)};
  const auto r = refine_ruin_probability(p, quick(20000), 3);
  const double target = std::exp(-2.0);
  // grid monitoring misses crossings, so every level sits below the target
  for (const auto& l : r.levels) CHECK(l.estimate < target + 3 * l.std_error);
  CHECK(std::abs(r.extrapolated.estimate - target) < 3 * r.extrapolated.std_error + 0.01);
  CHECK_FALSE(r.extended.has_value());
}

TEST_CASE("row-1 parameters are within a factor of the asymptotic") {
  const auto est = ruin_probability_mc(row1(), quick(20000));
  const double ratio = est.estimate / 0.0363;
  CHECK(ratio >= 0.5);
  CHECK(ratio <= 1.5);
  CHECK(est.ci_low <= est.estimate);
  CHECK(est.ci_high >= est.estimate);
  CHECK(est.std_error == doctest::Approx(std::sqrt(est.estimate * (1 - est.estimate) / est.n)));
}

TEST_CASE("pathwise monotonicity on common random numbers") {
  const std::vector<RuinScenario> sc{{3.0, 0.0}, {3.0, 0.1}, {3.0, 0.3}, {4.0, 0.0}, {6.0, 0.0}};
  const auto tab = simulate_ruin_times(row1(), sc, quick(3000), 2);
  REQUIRE(tab.tau.rows() == 3000);
  REQUIRE(tab.steps.size() == 2);
  CHECK(tab.steps[1] == doctest::Approx(0.5 * tab.steps[0]));
  for (Eigen::Index i = 0; i < tab.tau.rows(); ++i) {
    for (std::size_t l = 0; l < 2; ++l) {
      // more tax: ruin no later
      CHECK(tab.tau(i, tab.column(1, l)) <= tab.tau(i, tab.column(0, l)));
      CHECK(tab.tau(i, tab.column(2, l)) <= tab.tau(i, tab.column(1, l)));
      // more capital: ruin no earlier
      CHECK(tab.tau(i, tab.column(3, l)) >= tab.tau(i, tab.column(0, l)));
      CHECK(tab.tau(i, tab.column(4, l)) >= tab.tau(i, tab.column(3, l)));
    }
    // finer grid: ruin no later
    for (std::size_t s = 0; s < sc.size(); ++s) CHECK(tab.tau(i, tab.column(s, 1)) <= tab.tau(i, tab.column(s, 0)));
  }
}

TEST_CASE("longer horizons extend the same paths") {
  const std::vector<RuinScenario> sc{{4.0, 0.2}};
  const auto cfg = quick(3000);
  const auto shorter = simulate_ruin_times(row1(), sc, cfg, 1, 10.0);
  const auto longer = simulate_ruin_times(row1(), sc, cfg, 1, 20.0);
  std::size_t n_short = 0, n_long = 0;
  for (Eigen::Index i = 0; i < shorter.tau.rows(); ++i) {
    const double a = shorter.tau(i, 0), b = longer.tau(i, 0);
    if (a < kInf) CHECK(b == a);
    n_short += a < kInf;
    n_long += b < kInf;
  }
  CHECK(n_long >= n_short);
}

TEST_CASE("refinement shifts are never negative") {
  const auto r = refine_ruin_probability(row1(), quick(5000), 3);
  REQUIRE(r.levels.size() == 3);
  REQUIRE(r.shifts.size() == 2);
  for (double s : r.shifts) CHECK(s >= 0.0);
  for (std::size_t l = 1; l < 3; ++l) CHECK(r.levels[l].estimate >= r.levels[l - 1].estimate);
}

TEST_CASE("Richardson weights in sqrt(step)") {
  const std::vector<double> steps{0.01, 0.005, 0.0025};
  const auto w = richardson_weights(steps);
  CHECK(w(0) == doctest::Approx(2.414214).epsilon(1e-5));
  CHECK(w(1) == doctest::Approx(-8.242641).epsilon(1e-5));
  CHECK(w(2) == doctest::Approx(6.828427).epsilon(1e-5));
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
  // exact on a + b sqrt(h) + c h
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) acc += w(i) * (0.3 + 2.0 * std::sqrt(steps[i]) - 5.0 * steps[i]);
  CHECK(acc == doctest::Approx(0.3).epsilon(1e-12));
  const std::vector<double> one{0.01};
  CHECK(richardson_weights(one)(0) == 1.0);
}

TEST_CASE("results do not depend on the worker count") {
  SimConfig a = quick(2000), b = quick(2000);
  a.workers = 1;
  b.workers = 3;
  const std::vector<RuinScenario> sc{{5.0, 0.1}, {4.0, 0.2}};
  const auto ta = simulate_ruin_times(row1(), sc, a, 2);
  const auto tb = simulate_ruin_times(row1(), sc, b, 2);
  CHECK((ta.tau.array() == tb.tau.array()).all());
  CHECK(ruin_probability_mc(row1(), a).estimate == ruin_probability_mc(row1(), b).estimate);
}

TEST_CASE("infinite horizon") {
  ModelParams p = row1();
  p.horizon = Horizon::infinite();
  CHECK(auto_infinite_truncation(0.05) == 185.0);
  CHECK(simulated_horizon(p, quick(10)) == 185.0);
  SimConfig cfg = quick(10);
  cfg.infinite_truncation = 50.0;
  CHECK_THROWS_AS(simulated_horizon(p, cfg), std::invalid_argument);
  p.delta = 0.0;
  CHECK_THROWS_WITH_AS(ruin_probability_mc(p, quick(10)), doctest::Contains("delta"), std::invalid_argument);
  p.delta = -0.05;
  CHECK_THROWS_AS(ruin_probability_mc(p, quick(10)), std::invalid_argument);
}

TEST_CASE("infinite-horizon refinement reports the extension") {
  ModelParams p = row1();
  p.delta = 0.1;
  p.u = 4.0;
  p.horizon = Horizon::infinite();
  const auto r = refine_ruin_probability(p, quick(2000, 0.02), 1);
  REQUIRE(r.extended.has_value());
  CHECK(r.extended->estimate >= r.levels.back().estimate);
  CHECK(r.horizon == auto_infinite_truncation(0.1));
}

TEST_CASE("invalid simulation settings") {
  CHECK_THROWS_AS(ruin_probability_mc(row1(), quick(0)), std::invalid_argument);
  CHECK_THROWS_AS(ruin_probability_mc(row1(), quick(10, 0.0)), std::invalid_argument);
  ModelParams bad = row1();
  bad.gamma = 1.0;
  CHECK_THROWS_AS(ruin_probability_mc(bad, quick(10)), std::invalid_argument);
  const std::vector<RuinScenario> none;
  CHECK_THROWS_AS(simulate_ruin_times(row1(), none, quick(10)), std::invalid_argument);
}

TEST_CASE("conditional ruin-time law") {
  ModelParams p = row1();
  p.u = 3.0;
  const auto law = conditional_ruin_time_empirical(p, quick(5000), RuinTimeTransform::finite);
  REQUIRE(law.n_ruined() >= kMinRuinEvents);
  CHECK(law.n_paths == 5000);
  // u^2 (T - tau) >= 0 on every ruined path
  CHECK(law.cdf(-1e-12) == 0.0);
  CHECK(law.values.minCoeff() >= 0.0);
  CHECK(law.cdf(law.values.maxCoeff()) == 1.0);
  double prev = 0.0;
  for (double x = 0.0; x <= law.values.maxCoeff(); x += law.values.maxCoeff() / 50) {
    const double f = law.cdf(x);
    CHECK(f >= prev);
    CHECK(f <= 1.0);
    prev = f;
  }
  CHECK(std::is_sorted(law.values.data(), law.values.data() + law.values.size()));
  CHECK(law.ks >= 0.0);
  CHECK(law.ks <= 1.0);

  p.u = 12.0;
  CHECK_THROWS_WITH_AS(conditional_ruin_time_empirical(p, quick(500), RuinTimeTransform::finite),
                       doctest::Contains("ruin events"), std::runtime_error);
  ModelParams q = row1();
  q.horizon = Horizon::infinite();
  CHECK_THROWS_AS(conditional_ruin_time_empirical(q, quick(10), RuinTimeTransform::infinite), std::invalid_argument);
}

TEST_CASE("conditional law from given ruin times") {
  ModelParams p = row1();
  std::vector<double> taus;
  for (int i = 0; i < 300; ++i) taus.push_back(20.0 - 0.001 * i);
  taus.push_back(kInf);
  const auto law = conditional_ruin_time_empirical(p, taus, 1000, RuinTimeTransform::finite,
                                                   [](double x) { return std::min(1.0, x / 7.5); });
  CHECK(law.n_ruined() == 300);
  CHECK(law.values(0) == 0.0);
  CHECK(law.values(299) == doctest::Approx(25.0 * 0.299));
  CHECK(law.ks == doctest::Approx(1.0 - 25.0 * 0.299 / 7.5).epsilon(1e-9));
}

TEST_CASE("KS distance") {
  Eigen::VectorXd one(1);
  one << 0.5;
  const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_distance(one, uniform) == doctest::Approx(0.5));
  Eigen::VectorXd grid(100);
  for (int i = 0; i < 100; ++i) grid(i) = (i + 0.5) / 100.0;
  CHECK(ks_distance(grid, uniform) == doctest::Approx(0.005));
}

TEST_CASE("ruin-time CSV") {
  std::vector<RuinTimeSample> s{{0, true, 1.25}, {1, false, std::nullopt}};
  std::ostringstream os;
  write_ruin_time_csv(os, s);
  const std::string text = os.str();
  CHECK(text.rfind("path_id,ruined,tau\n", 0) == 0);
  CHECK(text.find("0,1,1.25") != std::string::npos);
  CHECK(text.find("1,0,") != std::string::npos);
}
