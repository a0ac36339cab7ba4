#include "ruin/risk_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ruin/random.hpp"

namespace ruin {

void ModelParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("invalid model: " + what); };
  if (!(c > 0.0)) fail("c > 0 required");
  if (!(sigma > 0.0)) fail("sigma > 0 required");
  if (!(gamma >= 0.0 && gamma < 1.0)) fail("0 <= gamma < 1 required");
  if (!(u >= 0.0)) fail("u >= 0 required");
  if (!std::isfinite(delta)) fail("delta must be finite");
  if (horizon.is_finite()) {
    if (!(horizon.T() > 0.0) || !std::isfinite(horizon.T())) fail("finite horizon T > 0 required");
  } else if (!(delta > 0.0) || is_zero_interest(delta)) {
    fail("infinite horizon requires delta > 0");
  }
}

GridSpec GridSpec::from_step(double t_end, double step) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("grid: t_end must be > 0");
  if (!(step > 0.0)) throw std::invalid_argument("grid: step must be > 0");
  // Tolerate t_end/step landing a hair above an integer.
  const double ratio = t_end / step;
  auto n = static_cast<std::size_t>(std::ceil(ratio - 1e-9 * ratio));
  return {t_end, std::max<std::size_t>(n, 1)};
}

Eigen::VectorXd GridSpec::times() const {
  Eigen::VectorXd t(static_cast<Eigen::Index>(n_steps) + 1);
  const double h = step();
  for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = h * static_cast<double>(i);
  t(t.size() - 1) = t_end;
  return t;
}

PathSample make_path(const Eigen::VectorXd& times, const Eigen::VectorXd& y_values,
                     const ModelParams& p) {
  if (times.size() == 0 || times.size() != y_values.size())
    throw std::invalid_argument("make_path: times and values must be non-empty and equal length");
  if (times(0) != 0.0) throw std::invalid_argument("make_path: times must start at 0");
  if (y_values(0) != p.u) throw std::invalid_argument("make_path: Y(0) must equal u");
  PathSample path{times, y_values, Eigen::VectorXd(times.size())};
  const double delta = is_zero_interest(p.delta) ? 0.0 : p.delta;
  double running = 0.0;
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times(i) > times(i - 1)))
      throw std::invalid_argument("make_path: times must be strictly increasing");
    running = std::max(running, y_values(i) - p.u * std::exp(-delta * times(i)));
    path.running_max_excess(i) = running;
  }
  return path;
}

PathSample simulate_path(const ModelParams& p, const GridSpec& grid, std::uint64_t seed,
                         std::uint64_t path_index) {
  p.validate();
  const Eigen::VectorXd t = grid.times();
  Eigen::VectorXd y(t.size());
  NormalStream normal(seed, path_index);
  y(0) = p.u;
  for (Eigen::Index i = 1; i < t.size(); ++i) {
    const auto law = y_increment_law(t(i - 1), t(i) - t(i - 1), p);
    y(i) = y(i - 1) + law.mean + std::sqrt(law.variance) * normal();
  }
  return make_path(t, y, p);
}

TaxedSurplus apply_tax(const PathSample& path, const ModelParams& p) {
  const Eigen::Index n = path.y_values.size();
  if (n == 0 || path.times.size() != n || path.running_max_excess.size() != n)
    throw std::invalid_argument("apply_tax: malformed path");
  TaxedSurplus out;
  out.values = path.y_values - p.gamma * path.running_max_excess;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out.values(i) < 0.0) {
      out.ruined = true;
      out.first_ruin = i;
      break;
    }
  }
  return out;
}

double normal_survival(double x) {
  if (std::isnan(x)) throw std::domain_error("normal_survival: NaN argument");
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double log_normal_survival(double x) {
  if (std::isnan(x)) throw std::domain_error("log_normal_survival: NaN argument");
  if (x < 5.0) return std::log(normal_survival(x));
  // Mills ratio R(x) = Psi(x)/phi(x) as the Laplace continued fraction
  // 1/(x + 1/(x + 2/(x + 3/(x + ...)))), evaluated backwards.
  constexpr int kTerms = 120;
  double tail = x;
  for (int k = kTerms; k >= 1; --k) tail = x + k / tail;
  const double log_phi = -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
  return log_phi - std::log(tail);
}

}  // namespace ruin
