#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ruin/mc_estimate.hpp"
#include "ruin/risk_model.hpp"

namespace ruin {

struct SimConfig {
  std::size_t n_paths = 100000;
  double step = 0.01;  // coarsest grid step
  std::uint64_t seed = 1;
  /// Simulated horizon for an infinite-horizon model; chosen from the variance
  /// saturation criterion e^{-2 delta T} < 1e-8 when empty.
  std::optional<double> infinite_truncation;
  bool record_ruin_times = true;
  unsigned workers = 0;
};

/// Smallest truncation with e^{-2 delta T} < 1e-8.
double auto_infinite_truncation(double delta);

/// Horizon actually simulated for p: T, or the (checked) truncation.
double simulated_horizon(const ModelParams& p, const SimConfig& cfg);

/// A (u, gamma) pair evaluated on shared paths.
struct RuinScenario {
  double u;
  double gamma;
};

/// First-passage times of the taxed surplus, one row per path.
///
/// Column scenario * steps.size() + level holds the first grid time at which
/// U < 0 on the grid of that level, or +inf when the path survives the
/// horizon. Levels are nested grids, coarsest first, each halving the step.
struct RuinTimeTable {
  Eigen::MatrixXd tau;
  std::vector<RuinScenario> scenarios;
  std::vector<double> steps;
  double horizon = 0.0;
  std::uint64_t seed = 0;

  Eigen::Index column(std::size_t scenario, std::size_t level) const {
    return static_cast<Eigen::Index>(scenario * steps.size() + level);
  }
};

/// Simulates Y once per path on the finest grid and scores every scenario
/// and level on it. u and gamma of `base` are ignored in favour of the
/// scenarios.
RuinTimeTable simulate_ruin_times(const ModelParams& base, std::span<const RuinScenario> scenarios,
                                  const SimConfig& cfg, int levels = 1,
                                  std::optional<double> horizon = std::nullopt);

/// Fraction of paths ruined on the grid of step cfg.step.
MCEstimate ruin_probability_mc(const ModelParams& p, const SimConfig& cfg);

struct RefinementReport {
  RuinScenario scenario{};
  double horizon = 0.0;
  std::vector<double> steps;      // coarse to fine
  std::vector<MCEstimate> levels;
  std::vector<double> shifts;     // level l minus level l-1, same paths
  bool converged = false;         // last shift below one std error of the finest level
  MCEstimate extrapolated;        // Richardson extrapolation in sqrt(step) to step 0
  std::optional<MCEstimate> extended;  // infinite horizon: finest level on twice the truncation
  bool extension_flag = false;    // extension moved the finest estimate by >= 1 std error
};

/// Lagrange weights at 0 for nodes sqrt(steps).
Eigen::VectorXd richardson_weights(std::span<const double> steps);

std::vector<RefinementReport> refine_ruin_probabilities(const ModelParams& base,
                                                        std::span<const RuinScenario> scenarios,
                                                        const SimConfig& cfg, int levels);

RefinementReport refine_ruin_probability(const ModelParams& p, const SimConfig& cfg, int levels = 3);

struct RuinTimeSample {
  std::size_t path_id;
  bool ruined;
  std::optional<double> tau;
};

std::vector<RuinTimeSample> ruin_time_samples(const ModelParams& p, const SimConfig& cfg);

void write_ruin_time_csv(std::ostream& os, std::span<const RuinTimeSample> samples);

enum class RuinTimeTransform { finite, infinite };

struct EmpiricalRuinTimeLaw {
  RuinTimeTransform transform = RuinTimeTransform::finite;
  Eigen::VectorXd values;  // rescaled ruin times of ruined paths, ascending
  std::size_t n_paths = 0;
  double ks = 0.0;         // against the supplied limit law

  std::size_t n_ruined() const { return static_cast<std::size_t>(values.size()); }
  /// Empirical P(X <= x).
  double cdf(double x) const;
};

inline constexpr std::size_t kMinRuinEvents = 200;

/// Empirical law of u^2 (T - tau) (finite) or u^2 (e^{-2 delta tau} - t_u)
/// (infinite) given ruin. `limit_cdf` is the reference CDF for the KS
/// distance; for the finite transform it defaults to 1 - exp(-rate_lambda x).
EmpiricalRuinTimeLaw conditional_ruin_time_empirical(
    const ModelParams& p, const SimConfig& cfg, RuinTimeTransform transform,
    std::function<double(double)> limit_cdf = {});

/// Same, from ruin times already simulated.
EmpiricalRuinTimeLaw conditional_ruin_time_empirical(
    const ModelParams& p, std::span<const double> ruin_times, std::size_t n_paths,
    RuinTimeTransform transform, std::function<double(double)> limit_cdf = {});

/// sup_x |F_n(x) - F(x)| for ascending samples.
double ks_distance(const Eigen::Ref<const Eigen::VectorXd>& sorted,
                   const std::function<double(double)>& cdf);

}  // namespace ruin
