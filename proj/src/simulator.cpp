#include "ruin/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ruin/asymptotics.hpp"
#include "ruin/random.hpp"

namespace ruin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSaturation = 1e-8;

void check_config(const SimConfig& cfg) {
  if (cfg.n_paths < 1) throw std::invalid_argument("simulation: n_paths >= 1 required");
  if (!(cfg.step > 0.0)) throw std::invalid_argument("simulation: step > 0 required");
}

MCEstimate ruined_fraction(const Eigen::Ref<const Eigen::VectorXd>& tau, double horizon,
                           std::uint64_t seed) {
  const auto hits = static_cast<std::size_t>((tau.array() <= horizon).count());
  return MCEstimate::bernoulli(hits, static_cast<std::size_t>(tau.size()), seed);
}

}  // namespace

double auto_infinite_truncation(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("auto_infinite_truncation: delta > 0 required");
  return std::ceil(-std::log(kSaturation) / (2.0 * delta) + 1e-9);
}

double simulated_horizon(const ModelParams& p, const SimConfig& cfg) {
  p.validate();
  if (p.horizon.is_finite()) return p.horizon.T();
  const double T = cfg.infinite_truncation ? *cfg.infinite_truncation
                                           : auto_infinite_truncation(p.delta);
  if (!(std::exp(-2.0 * p.delta * T) < kSaturation)) {
    std::ostringstream os;
    os << "simulation: infinite_truncation " << T << " leaves e^{-2 delta T} = "
       << std::exp(-2.0 * p.delta * T) << " (must be < " << kSaturation << ")";
    throw std::invalid_argument(os.str());
  }
  return T;
}

RuinTimeTable simulate_ruin_times(const ModelParams& base, std::span<const RuinScenario> scenarios,
                                  const SimConfig& cfg, int levels, std::optional<double> horizon) {
  check_config(cfg);
  if (levels < 1 || levels > 12) throw std::invalid_argument("simulation: levels in [1, 12]");
  if (scenarios.empty()) throw std::invalid_argument("simulation: no scenarios");
  for (const auto& s : scenarios) {
    ModelParams q = base;
    q.u = s.u;
    q.gamma = s.gamma;
    q.validate();
  }
  const double T = horizon ? *horizon : simulated_horizon(base, cfg);
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("simulation: horizon must be finite and > 0");

  const GridSpec coarse = GridSpec::from_step(T, cfg.step);
  const std::size_t fine_factor = std::size_t{1} << (levels - 1);
  const GridSpec fine{T, coarse.n_steps * fine_factor};
  const auto n_fine = static_cast<Eigen::Index>(fine.n_steps);
  const Eigen::VectorXd t = fine.times();
  const double h = fine.step();
  const double delta = is_zero_interest(base.delta) ? 0.0 : base.delta;

  // Increment k maps Y(t_k) to Y(t_{k+1}); the deterministic growth of the
  // tax threshold u e^{-delta t} enters through 1 - e^{-delta t}.
  Eigen::ArrayXd mean(n_fine), sd(n_fine), growth(n_fine + 1);
  const double unit_mean = base.c * discount_integral(delta, h);
  const double unit_sd = base.sigma * std::sqrt(discount_integral(2.0 * delta, h));
  for (Eigen::Index k = 0; k < n_fine; ++k) {
    const double disc = std::exp(-delta * t(k));
    mean(k) = unit_mean * disc;
    sd(k) = unit_sd * disc;
  }
  for (Eigen::Index k = 0; k <= n_fine; ++k) growth(k) = -std::expm1(-delta * t(k));

  RuinTimeTable table;
  table.scenarios.assign(scenarios.begin(), scenarios.end());
  for (int l = 0; l < levels; ++l) table.steps.push_back(coarse.step() / static_cast<double>(1 << l));
  table.horizon = T;
  table.seed = cfg.seed;
  const auto n_cols = static_cast<Eigen::Index>(scenarios.size() * static_cast<std::size_t>(levels));
  table.tau.setConstant(static_cast<Eigen::Index>(cfg.n_paths), n_cols, kInf);

  std::vector<Eigen::Index> stride(levels);
  for (int l = 0; l < levels; ++l) stride[l] = static_cast<Eigen::Index>(fine_factor >> l);

  parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> running(n_cols);
    std::vector<char> alive(n_cols);
    for (std::size_t path = begin; path < end; ++path) {
      NormalStream normal(cfg.seed, path);
      std::fill(running.begin(), running.end(), 0.0);
      std::fill(alive.begin(), alive.end(), 1);
      Eigen::Index n_alive = n_cols;
      const auto row = static_cast<Eigen::Index>(path);
      // z = Y - u, which does not depend on the scenario.
      double z = 0.0;
      for (Eigen::Index k = 0; k < n_fine && n_alive > 0; ++k) {
        z += mean(k) + sd(k) * normal();
        const Eigen::Index next = k + 1;
        for (int l = 0; l < levels; ++l) {
          if (next % stride[l] != 0) continue;
          for (std::size_t s = 0; s < scenarios.size(); ++s) {
            const Eigen::Index col = table.column(s, static_cast<std::size_t>(l));
            if (!alive[col]) continue;
            const RuinScenario& sc = scenarios[s];
            running[col] = std::max(running[col], z + sc.u * growth(next));
            if (sc.u + z - sc.gamma * running[col] < 0.0) {
              alive[col] = 0;
              --n_alive;
              table.tau(row, col) = t(next);
            }
          }
        }
      }
    }
  });
  return table;
}

MCEstimate ruin_probability_mc(const ModelParams& p, const SimConfig& cfg) {
  const RuinScenario sc{p.u, p.gamma};
  const RuinTimeTable table = simulate_ruin_times(p, std::span(&sc, 1), cfg, 1);
  return ruined_fraction(table.tau.col(0), table.horizon, cfg.seed);
}

Eigen::VectorXd richardson_weights(std::span<const double> steps) {
  const auto n = static_cast<Eigen::Index>(steps.size());
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double si = std::sqrt(steps[i]);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double sj = std::sqrt(steps[j]);
      w(i) *= sj / (sj - si);
    }
  }
  return w;
}

std::vector<RefinementReport> refine_ruin_probabilities(const ModelParams& base,
                                                        std::span<const RuinScenario> scenarios,
                                                        const SimConfig& cfg, int levels) {
  const double T = simulated_horizon(base, cfg);
  const bool infinite = !base.horizon.is_finite();
  // The infinite horizon is simulated twice as long to confirm the truncation.
  const RuinTimeTable table =
      simulate_ruin_times(base, scenarios, cfg, levels, infinite ? 2.0 * T : T);
  const Eigen::VectorXd w = richardson_weights(table.steps);
  const auto n = table.tau.rows();

  std::vector<RefinementReport> out;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    RefinementReport r;
    r.scenario = scenarios[s];
    r.horizon = T;
    r.steps = table.steps;
    Eigen::ArrayXd combined = Eigen::ArrayXd::Zero(n);
    for (int l = 0; l < levels; ++l) {
      const auto col = table.tau.col(table.column(s, static_cast<std::size_t>(l)));
      r.levels.push_back(ruined_fraction(col, T, cfg.seed));
      if (l > 0) r.shifts.push_back(r.levels[l].estimate - r.levels[l - 1].estimate);
      combined += w(l) * (col.array() <= T).cast<double>();
    }
    const MCEstimate& finest = r.levels.back();
    r.converged = !r.shifts.empty() && std::abs(r.shifts.back()) < finest.std_error;
    r.extrapolated = MCEstimate::from_samples(combined, cfg.seed);
    if (infinite) {
      const auto col = table.tau.col(table.column(s, static_cast<std::size_t>(levels - 1)));
      r.extended = ruined_fraction(col, 2.0 * T, cfg.seed);
      r.extension_flag = r.extended->estimate - finest.estimate >= finest.std_error;
    }
    out.push_back(std::move(r));
  }
  return out;
}

RefinementReport refine_ruin_probability(const ModelParams& p, const SimConfig& cfg, int levels) {
  const RuinScenario sc{p.u, p.gamma};
  return refine_ruin_probabilities(p, std::span(&sc, 1), cfg, levels).front();
}

std::vector<RuinTimeSample> ruin_time_samples(const ModelParams& p, const SimConfig& cfg) {
  if (!cfg.record_ruin_times)
    throw std::invalid_argument("ruin_time_samples: record_ruin_times is off");
  const RuinScenario sc{p.u, p.gamma};
  const RuinTimeTable table = simulate_ruin_times(p, std::span(&sc, 1), cfg, 1);
  std::vector<RuinTimeSample> out;
  out.reserve(cfg.n_paths);
  for (Eigen::Index i = 0; i < table.tau.rows(); ++i) {
    const double tau = table.tau(i, 0);
    const bool ruined = std::isfinite(tau);
    out.push_back({static_cast<std::size_t>(i), ruined,
                   ruined ? std::optional<double>(tau) : std::nullopt});
  }
  return out;
}

void write_ruin_time_csv(std::ostream& os, std::span<const RuinTimeSample> samples) {
  const auto old = os.precision(17);
  os << "path_id,ruined,tau\n";
  for (const auto& s : samples) {
    os << s.path_id << ',' << (s.ruined ? 1 : 0) << ',';
    if (s.tau) os << *s.tau;
    os << '\n';
  }
  os.precision(old);
}

double EmpiricalRuinTimeLaw::cdf(double x) const {
  if (values.size() == 0) return 0.0;
  const auto it = std::upper_bound(values.data(), values.data() + values.size(), x);
  return static_cast<double>(it - values.data()) / static_cast<double>(values.size());
}

double ks_distance(const Eigen::Ref<const Eigen::VectorXd>& sorted,
                   const std::function<double(double)>& cdf) {
  const auto n = sorted.size();
  if (n == 0) throw std::invalid_argument("ks_distance: no samples");
  double d = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double f = cdf(sorted(i));
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

EmpiricalRuinTimeLaw conditional_ruin_time_empirical(const ModelParams& p,
                                                     std::span<const double> ruin_times,
                                                     std::size_t n_paths,
                                                     RuinTimeTransform transform,
                                                     std::function<double(double)> limit_cdf) {
  p.validate();
  if (transform == RuinTimeTransform::finite && !p.horizon.is_finite())
    throw std::invalid_argument("conditional_ruin_time_empirical: finite transform needs a finite horizon");
  if (transform == RuinTimeTransform::infinite && !(p.delta > 0.0))
    throw std::invalid_argument("conditional_ruin_time_empirical: infinite transform needs delta > 0");
  if (transform == RuinTimeTransform::infinite && !limit_cdf)
    throw std::invalid_argument("conditional_ruin_time_empirical: infinite transform needs a limit law");
  std::vector<double> x;
  const double u2 = p.u * p.u;
  const double tu = transform == RuinTimeTransform::infinite ? t_u(p) : 0.0;
  for (double tau : ruin_times) {
    if (!std::isfinite(tau)) continue;
    if (transform == RuinTimeTransform::finite) x.push_back(u2 * (p.horizon.T() - tau));
    else x.push_back(u2 * (std::exp(-2.0 * p.delta * tau) - tu));
  }
  if (x.size() < kMinRuinEvents) {
    std::ostringstream os;
    os << "conditional_ruin_time_empirical: " << x.size() << " ruin events, at least "
       << kMinRuinEvents << " required";
    throw std::runtime_error(os.str());
  }
  std::sort(x.begin(), x.end());
  EmpiricalRuinTimeLaw law;
  law.transform = transform;
  law.values = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  law.n_paths = n_paths;
  if (!limit_cdf) {
    limit_cdf = [p](double v) { return v <= 0.0 ? 0.0 : 1.0 - finite_horizon_ruin_time_tail(v, p); };
  }
  law.ks = ks_distance(law.values, limit_cdf);
  return law;
}

EmpiricalRuinTimeLaw conditional_ruin_time_empirical(const ModelParams& p, const SimConfig& cfg,
                                                     RuinTimeTransform transform,
                                                     std::function<double(double)> limit_cdf) {
  if (transform == RuinTimeTransform::infinite && !limit_cdf)
    throw std::invalid_argument("conditional_ruin_time_empirical: infinite transform needs a limit law");
  const RuinScenario sc{p.u, p.gamma};
  const RuinTimeTable table = simulate_ruin_times(p, std::span(&sc, 1), cfg, 1);
  const Eigen::VectorXd tau = table.tau.col(0);
  return conditional_ruin_time_empirical(p, std::span(tau.data(), static_cast<std::size_t>(tau.size())),
                                         cfg.n_paths, transform, std::move(limit_cdf));
}

}  // namespace ruin
