#pragma once

#include <cmath>
#include <numbers>

#include "ruin/risk_model.hpp"

namespace ruin {

/// A probability together with its natural log; the log stays finite when
/// the value underflows.
struct Approximation {
  double value;
  double log_value;
};

/// Scalars entering the finite-horizon ruin asymptotics.
template <typename Scalar>
struct FiniteHorizonQuantities {
  Scalar a_sq;         // Var of the discounted loss at T
  Scalar a;
  Scalar prefactor;    // 2(1 + e^{-2 delta T}) / (1 - gamma + e^{-2 delta T})
  Scalar psi_arg;      // (u + (c/delta)(1 - e^{-delta T})) / a
  Scalar rate_lambda;  // sigma^2 e^{-2 delta T} / (2 a^2)
};

template <typename Scalar>
FiniteHorizonQuantities<Scalar> finite_horizon_quantities(Scalar u, Scalar c, Scalar sigma,
                                                          Scalar delta, Scalar gamma, Scalar T) {
  using std::exp;
  using std::sqrt;
  FiniteHorizonQuantities<Scalar> q;
  const Scalar e2 = exp(-Scalar(2) * delta * T);
  q.a_sq = sigma * sigma * discount_integral(Scalar(2) * delta, T);
  q.a = sqrt(q.a_sq);
  q.prefactor = Scalar(2) * (Scalar(1) + e2) / (Scalar(1) - gamma + e2);
  q.psi_arg = (u + c * discount_integral(delta, T)) / q.a;
  q.rate_lambda = sigma * sigma * e2 / (Scalar(2) * q.a_sq);
  return q;
}

/// Throws unless p has a finite horizon and a nonzero force of interest.
FiniteHorizonQuantities<double> finite_horizon_quantities(const ModelParams& p);

/// Scalars entering the infinite-horizon ruin asymptotics.
template <typename Scalar>
struct InfiniteHorizonQuantities {
  Scalar b;    // c^2 / (sigma^2 delta)
  Scalar t_u;  // (c / (delta u + c))^2
  Scalar m_u;  // (sqrt 2 / sigma) sqrt(delta u^2 + 2 c u)
};

template <typename Scalar>
InfiniteHorizonQuantities<Scalar> infinite_horizon_quantities(Scalar u, Scalar c, Scalar sigma,
                                                              Scalar delta) {
  using std::sqrt;
  const Scalar r = c / (delta * u + c);
  return {c * c / (sigma * sigma * delta), r * r,
          Scalar(std::numbers::sqrt2) / sigma * sqrt(delta * u * u + Scalar(2) * c * u)};
}

/// Throws unless p is valid with delta > 0 (either horizon).
InfiniteHorizonQuantities<double> infinite_horizon_quantities(const ModelParams& p);

/// Large-u ruin probability on a finite horizon:
/// prefactor * Psi((u + (c/delta)(1 - e^{-delta T})) / a). Valid for either sign of delta.
Approximation finite_horizon_ruin_asymptotic(const ModelParams& p);

/// Large-u ruin probability on the infinite horizon (delta > 0):
/// phat / (1 - gamma) * Psi((sqrt 2 / sigma) sqrt(delta u^2 + 2 c u)), where
/// phat is the generalized Piterbarg constant with b = c^2/(sigma^2 delta) on [0, inf).
Approximation infinite_horizon_ruin_asymptotic(const ModelParams& p, double phat);

/// Exponent convention selected by Monte Carlo: the tax-free zero-interest
/// ruin probability is exp(-2 c u / sigma^2).
inline constexpr int kDefaultExponentFactor = 2;

/// Zero-interest ruin probability on the infinite horizon with loss-carry-forward
/// tax: 1 - (1 - exp(-kappa c u / sigma^2))^{1/(1-gamma)}.
double zero_interest_ruin_probability(double u, double c, double sigma, double gamma,
                                      int exponent_factor = kDefaultExponentFactor);

/// Limit of P(u^2 (T - tau) > x | tau <= T).
double finite_horizon_ruin_time_tail(double x, const ModelParams& p);

/// Right end of the constant's interval in the infinite-horizon ruin-time law:
/// x + c/(sigma sqrt(delta)).
double ruin_time_interval_end(double x, const ModelParams& p);

/// Limit of P(u^2 (e^{-2 delta tau} - t_u) <= x | tau < inf), given the
/// constant on [0, x + c/(sigma sqrt delta)] and on [0, inf).
double infinite_horizon_ruin_time_cdf(double x, const ModelParams& p, double phat_partial,
                                      double phat_full);

/// t_u = (c/(delta u + c))^2; requires delta > 0.
double t_u(const ModelParams& p);

/// Both sides of the two equivalent infinite-horizon forms:
/// lhs = phat * Psi((sqrt 2/sigma) sqrt(delta u^2 + 2 c u)),
/// rhs = ptilde * Psi(sqrt 2 (delta u + c) / (sigma sqrt delta)).
/// Their ratio tends to 1 as u grows when phat = e^{-b} ptilde.
std::pair<Approximation, Approximation> equivalent_infinite_horizon_forms(const ModelParams& p,
                                                                         double phat,
                                                                         double ptilde);

}  // namespace ruin
