#include "ruin/asymptotics.hpp"

#include <stdexcept>
#include <utility>

namespace ruin {

namespace {

void require_infinite_horizon(const ModelParams& p, const char* who) {
  if (p.horizon.is_finite())
    throw std::invalid_argument(std::string(who) + ": requires an infinite horizon");
}

void require_infinite_regime(const ModelParams& p, const char* who) {
  if (!(p.delta > 0.0) || is_zero_interest(p.delta)) {
    throw std::domain_error(std::string(who) +
                            ": requires delta > 0; for delta <= 0 the discounted loss has "
                            "unbounded supremum on [0, inf) and ruin is certain");
  }
}

Approximation scaled_survival(double scale, double x) {
  return {scale * normal_survival(x), std::log(scale) + log_normal_survival(x)};
}

}  // namespace

FiniteHorizonQuantities<double> finite_horizon_quantities(const ModelParams& p) {
  p.validate();
  if (!p.horizon.is_finite())
    throw std::invalid_argument("finite horizon quantities need a finite horizon");
  if (is_zero_interest(p.delta))
    throw std::domain_error(
        "finite-horizon asymptotics are not available for delta = 0; use "
        "zero_interest_ruin_probability");
  return finite_horizon_quantities<double>(p.u, p.c, p.sigma, p.delta, p.gamma, p.horizon.T());
}

InfiniteHorizonQuantities<double> infinite_horizon_quantities(const ModelParams& p) {
  if (!(p.c > 0.0) || !(p.sigma > 0.0) || !(p.u >= 0.0))
    throw std::invalid_argument("invalid model: c > 0, sigma > 0, u >= 0 required");
  require_infinite_regime(p, "infinite horizon quantities");
  return infinite_horizon_quantities<double>(p.u, p.c, p.sigma, p.delta);
}

Approximation finite_horizon_ruin_asymptotic(const ModelParams& p) {
  const auto q = finite_horizon_quantities(p);
  return scaled_survival(q.prefactor, q.psi_arg);
}

Approximation infinite_horizon_ruin_asymptotic(const ModelParams& p, double phat) {
  require_infinite_horizon(p, "infinite_horizon_ruin_asymptotic");
  require_infinite_regime(p, "infinite_horizon_ruin_asymptotic");
  p.validate();
  if (!(phat > 0.0)) throw std::invalid_argument("infinite_horizon_ruin_asymptotic: phat > 0");
  const auto q = infinite_horizon_quantities<double>(p.u, p.c, p.sigma, p.delta);
  return scaled_survival(phat / (1.0 - p.gamma), q.m_u);
}

double zero_interest_ruin_probability(double u, double c, double sigma, double gamma,
                                      int exponent_factor) {
  if (!(u >= 0.0) || !(c > 0.0) || !(sigma > 0.0) || !(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("zero_interest_ruin_probability: u>=0, c>0, sigma>0, gamma in [0,1)");
  if (exponent_factor != 1 && exponent_factor != 2)
    throw std::invalid_argument("zero_interest_ruin_probability: exponent factor must be 1 or 2");
  const double q = std::exp(-exponent_factor * c * u / (sigma * sigma));
  return -std::expm1(std::log1p(-q) / (1.0 - gamma));
}

double finite_horizon_ruin_time_tail(double x, const ModelParams& p) {
  if (!(x >= 0.0)) throw std::invalid_argument("finite_horizon_ruin_time_tail: x >= 0 required");
  return std::exp(-finite_horizon_quantities(p).rate_lambda * x);
}

double ruin_time_interval_end(double x, const ModelParams& p) {
  require_infinite_regime(p, "ruin_time_interval_end");
  return x + p.c / (p.sigma * std::sqrt(p.delta));
}

double infinite_horizon_ruin_time_cdf(double x, const ModelParams& p, double phat_partial,
                                      double phat_full) {
  require_infinite_horizon(p, "infinite_horizon_ruin_time_cdf");
  require_infinite_regime(p, "infinite_horizon_ruin_time_cdf");
  p.validate();
  if (!(ruin_time_interval_end(x, p) > 0.0))
    throw std::invalid_argument("infinite_horizon_ruin_time_cdf: x must exceed -c/(sigma sqrt delta)");
  if (!(phat_partial > 0.0) || !(phat_partial <= phat_full))
    throw std::invalid_argument("infinite_horizon_ruin_time_cdf: 0 < phat_partial <= phat_full");
  return phat_partial / phat_full;
}

double t_u(const ModelParams& p) { return infinite_horizon_quantities(p).t_u; }

std::pair<Approximation, Approximation> equivalent_infinite_horizon_forms(const ModelParams& p,
                                                                         double phat,
                                                                         double ptilde) {
  require_infinite_regime(p, "equivalent_infinite_horizon_forms");
  if (!(phat > 0.0) || !(ptilde > 0.0))
    throw std::invalid_argument("equivalent_infinite_horizon_forms: constants must be > 0");
  const auto q = infinite_horizon_quantities(p);
  const double rhs_arg =
      std::numbers::sqrt2 * (p.delta * p.u + p.c) / (p.sigma * std::sqrt(p.delta));
  return {scaled_survival(phat, q.m_u), scaled_survival(ptilde, rhs_arg)};
}

}  // namespace ruin
