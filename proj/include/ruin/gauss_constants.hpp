#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ruin/mc_estimate.hpp"

namespace ruin {

enum class ConstantFamily { pickands, piterbarg, generalized_phat, ptilde };

/// A Brownian functional E sup_{t in [s1, s2]} exp(sqrt(2) B(t) - D(t)) with
/// deterministic drift D:
///
///   pickands          D(t) = t
///   piterbarg(a)      D(t) = (1 + a) t
///   generalized_phat  D(t) = t + f (sqrt t - sqrt b)^2
///   ptilde(b)         D(t) = 2t - 2 sqrt(b t),  on [0, inf) only
///
/// Every family used here has a convex drift, which the estimator relies on
/// for its tail cut-off.
struct ConstantSpec {
  ConstantFamily family = ConstantFamily::pickands;
  double a = 0.0;
  double f = 0.0;
  double b = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;

  static ConstantSpec pickands(double s1, double s2);
  static ConstantSpec piterbarg(double a, double s1, double s2);
  static ConstantSpec generalized_phat(double f, double b, double s1, double s2);
  static ConstantSpec ptilde(double b);

  bool infinite() const { return s2 == std::numeric_limits<double>::infinity(); }
  double drift(double t) const;
  double drift_slope(double t) const;
  void validate() const;
  std::string describe() const;
};

struct EstimatorConfig {
  std::size_t n_paths = 100000;
  double step = 0.005;  // eta
  /// Truncation of infinite intervals; chosen automatically when empty.
  std::optional<double> truncation_horizon;
  std::uint64_t seed = 1;
  /// Simulate at eta/2 and compare with the eta subgrid; extend truncated
  /// intervals once to twice their length.
  bool refinement_checks = true;
  /// A path stops once the supremum beyond the current time can raise
  /// exp(sup) by more than this relative amount only with negligible weight.
  /// Zero disables the cut-off.
  double tail_tolerance = 1e-16;
  unsigned workers = 0;
};

/// Drift level the exponent's deterministic part must fall below at the
/// truncation horizon.
inline constexpr double kTruncationDriftLevel = 30.0;

struct ConstantEstimate {
  ConstantSpec spec;
  MCEstimate value;   // finest grid; the value for downstream use
  MCEstimate coarse;  // every other grid point (refinement check only)
  double step = 0.0;
  double coarse_step = 0.0;
  double refinement_shift = 0.0;  // value - coarse, on common paths
  double refinement_shift_std_error = 0.0;
  bool refinement_flag = false;   // |shift| > 3 std errors of value
  double truncation_horizon = std::numeric_limits<double>::quiet_NaN();
  MCEstimate extended;            // interval end pushed to 2x the truncation
  double extension_shift = 0.0;
  bool extension_flag = false;    // extension moved the value by >= 1 std error
  double jensen_witness = 0.0;    // exp(max over grid of -D): a lower bound
  double single_point_value = 0.0;  // E exp(sqrt2 B(s1) - D(s1)) = exp(s1 - D(s1))
};

/// Estimates several constants on common Brownian paths. All specs must
/// share s1; finite interval ends are snapped down to the simulation grid.
std::vector<ConstantEstimate> estimate_constants(std::span<const ConstantSpec> specs,
                                                 const EstimatorConfig& cfg);

ConstantEstimate estimate_constant(const ConstantSpec& spec, const EstimatorConfig& cfg);

struct PhatPtildePair {
  ConstantEstimate phat;    // generalized_phat(f = 1, b) on [0, inf)
  ConstantEstimate ptilde;  // ptilde(b)
};

PhatPtildePair estimate_pair_phat_ptilde(double b, const EstimatorConfig& cfg);

struct PickandsRatio {
  double S;
  ConstantEstimate h;  // plain average of exp(sup); hopeless for large S
  MCEstimate shifted;  // H[0, S] from the shift-averaged representation
  double ratio;        // shifted / S, NaN at S = 0
};

/// H[0, S] on the grid {0, eta, ..., S} via the uniform-shift identity
///   H[0,S] = (N+1) E[ max_i e^{W(t_i - t_K)} / sum_i e^{W(t_i - t_K)} ]
/// with W(t) = sqrt2 B(t) - |t| two-sided and K uniform on {0..N}.
/// Each sample lies in [1, N+1], so the variance stays bounded in S.
MCEstimate pickands_shifted(double S, const EstimatorConfig& cfg);

std::vector<PickandsRatio> pickands_rate_check(std::span<const double> S_list,
                                               const EstimatorConfig& cfg);

/// Smallest time beyond which the drift stays above kTruncationDriftLevel.
double auto_truncation_horizon(const ConstantSpec& spec);

}  // namespace ruin
