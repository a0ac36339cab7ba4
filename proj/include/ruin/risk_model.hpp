#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ruin {

/// Forces of interest with |delta| below this are treated as exactly zero.
inline constexpr double kDeltaZeroThreshold = 1e-12;

inline bool is_zero_interest(double delta) { return std::abs(delta) < kDeltaZeroThreshold; }

/// Integral of exp(-rate * v) over [0, t].
///
/// Evaluated as -expm1(-rate t) / rate, which is accurate for small |rate t|,
/// and falls back to the rate -> 0 limit t below kDeltaZeroThreshold.
/// Infinite t is allowed: 1/rate for rate > 0, +inf otherwise.
template <typename Scalar>
Scalar discount_integral(Scalar rate, Scalar t) {
  using std::abs;
  using std::expm1;
  if (abs(rate) < Scalar(kDeltaZeroThreshold)) return t;
  return -expm1(-rate * t) / rate;
}

class Horizon {
 public:
  static Horizon finite(double T) { return Horizon(T); }
  static Horizon infinite() { return Horizon(); }

  bool is_finite() const { return T_.has_value(); }
  double T() const {
    if (!T_) throw std::logic_error("horizon is infinite");
    return *T_;
  }

 private:
  Horizon() = default;
  explicit Horizon(double T) : T_(T) {}
  std::optional<double> T_;
};

/// Brownian risk model with force of interest delta and tax rate gamma.
struct ModelParams {
  double u = 0.0;      // initial capital
  double c = 1.0;      // premium rate
  double sigma = 1.0;  // volatility
  double delta = 0.0;  // force of interest
  double gamma = 0.0;  // tax rate, in [0, 1)
  Horizon horizon = Horizon::finite(1.0);

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

template <typename Scalar>
struct IncrementLaw {
  Scalar mean;
  Scalar variance;
};

/// Law of Y(t + dt) - Y(t) for the discounted surplus Y(t) = exp(-delta t) X(t).
///
/// mean     = c exp(-delta t) * int_0^dt exp(-delta v) dv
/// variance = sigma^2 exp(-2 delta t) * int_0^dt exp(-2 delta v) dv
template <typename Scalar>
IncrementLaw<Scalar> y_increment_law(Scalar t, Scalar dt, Scalar c, Scalar sigma, Scalar delta) {
  using std::exp;
  if (!(dt > Scalar(0))) throw std::invalid_argument("y_increment_law: dt must be > 0");
  if (!(t >= Scalar(0))) throw std::invalid_argument("y_increment_law: t must be >= 0");
  const Scalar d = is_zero_interest(static_cast<double>(delta)) ? Scalar(0) : delta;
  return {c * exp(-d * t) * discount_integral(d, dt),
          sigma * sigma * exp(-Scalar(2) * d * t) * discount_integral(Scalar(2) * d, dt)};
}

inline IncrementLaw<double> y_increment_law(double t, double dt, const ModelParams& p) {
  return y_increment_law<double>(t, dt, p.c, p.sigma, p.delta);
}

/// Uniform time grid on [0, t_end].
struct GridSpec {
  double t_end = 1.0;
  std::size_t n_steps = 1;

  /// Smallest number of steps whose step size does not exceed `step`.
  static GridSpec from_step(double t_end, double step);
  double step() const { return t_end / static_cast<double>(n_steps); }
  Eigen::VectorXd times() const;
};

/// One realisation of the discounted surplus on a grid.
///
/// running_max_excess(i) = max_{j <= i} (Y(t_j) - u exp(-delta t_j)): the
/// discounted amount by which the surplus has exceeded its interest-accrued
/// starting capital, i.e. the tax base.
struct PathSample {
  Eigen::VectorXd times;
  Eigen::VectorXd y_values;
  Eigen::VectorXd running_max_excess;
};

/// Builds a PathSample from given Y values (times[0] must be 0, y[0] must be u).
PathSample make_path(const Eigen::VectorXd& times, const Eigen::VectorXd& y_values,
                     const ModelParams& p);

/// Exact-law simulation of Y on `grid` using stream (seed, path_index).
PathSample simulate_path(const ModelParams& p, const GridSpec& grid, std::uint64_t seed,
                         std::uint64_t path_index);

struct TaxedSurplus {
  Eigen::VectorXd values;  // U(t_i) = Y(t_i) - gamma * running_max_excess(i)
  bool ruined = false;
  std::optional<Eigen::Index> first_ruin;
};

TaxedSurplus apply_tax(const PathSample& path, const ModelParams& p);

/// P(N(0,1) > x).
double normal_survival(double x);
/// log P(N(0,1) > x); finite for all finite x.
double log_normal_survival(double x);

}  // namespace ruin
