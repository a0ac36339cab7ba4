#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ruin/risk_model.hpp"

namespace ruin {

/// Finite horizon: 0 <= s <= t <= T in calendar time. Infinite horizon:
/// 0 < t <= s <= 1 in the coordinate e^{-2 delta time}.
enum class FieldDomain { finite_horizon, infinite_horizon };

struct FieldPoint {
  double s;
  double t;
  FieldDomain domain;
};

// Finite-horizon field. Z(s, t) is the loss process net of the tax refunded
// up to s, divided by 1 - gamma + gamma e^{-delta s}.

/// Var Z(s, t) = sigma^2 (D(2 delta, t) - gamma (2 - gamma) D(2 delta, s))
///               / (1 - gamma + gamma e^{-delta s})^2,  D(r, t) = (1 - e^{-r t}) / r.
double variance_finite(double s, double t, const ModelParams& p);

/// E Z(s, t) = (gamma c D(delta, s) - c D(delta, t)) / (1 - gamma + gamma e^{-delta s}).
double mean_finite(double s, double t, const ModelParams& p);

// Infinite-horizon field on 0 < t <= s <= 1 (requires delta > 0).

/// (sigma^2 / 2 delta) ((1 - t) - gamma (2 - gamma) (1 - s)).
double variance_infinite(double s, double t, const ModelParams& p);
/// u - gamma (u + c/delta)(1 - sqrt s) + (c/delta)(1 - sqrt t).
double g_u(double s, double t, const ModelParams& p);
/// G_u / V_Z.
double m_u_ratio(double s, double t, const ModelParams& p);
/// V_Z / G_u; throws std::domain_error where G_u <= 0.
double f_u(double s, double t, const ModelParams& p);

/// Result of a grid maximisation. Nodes are listed in the grid's own
/// coordinate: calendar time for the finite field, sqrt of the rescaled
/// coordinate for the infinite one.
struct GridArgmax {
  FieldPoint point;
  Eigen::Index i = 0;  // s index
  Eigen::Index j = 0;  // t index
  double value = 0.0;
  Eigen::VectorXd nodes;

  /// True when (s, t) lies in a grid cell adjacent to the argmax node.
  bool within_one_cell(double s, double t) const;
};

/// Maximises variance_finite over an n x n grid of [0, T]^2 restricted to s <= t.
/// Throws std::runtime_error when the maximum is attained at non-adjacent
/// cells (ties along s are expected and allowed when gamma = 0).
GridArgmax argmax_variance_grid(const ModelParams& p, int resolution);

/// Maximises f_u over an n x n grid uniform in sqrt of the rescaled
/// coordinate, from sqrt(1e-8) to 1, restricted to t <= s.
GridArgmax argmax_f_grid(const ModelParams& p, int resolution);

inline constexpr double kInfiniteGridStart = 1e-8;

struct VzExpansionCheck {
  double a = 0.0;
  double h = 0.0;
  double coef_s = 0.0;      // analytic d V_Z / d s at (0, T)
  double coef_s_fd = 0.0;
  double coef_tau = 0.0;    // analytic d V_Z / d (T - t) at (0, T)
  double coef_tau_fd = 0.0;
  double err_s = 0.0;       // relative, or absolute when coef_s = 0
  double err_tau = 0.0;
  bool pass = false;
};

inline constexpr double kExpansionTolerance = 1e-3;

/// First-order expansion of V_Z at (0, T) against one-sided differences of
/// step h (default 1e-5 T).
VzExpansionCheck expansion_check_vz(const ModelParams& p, double h = 0.0);

struct LemmaCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Every applicable check for p: the finite-horizon ones need a finite
/// horizon and delta != 0, the infinite-horizon ones delta > 0.
std::vector<LemmaCheck> verify_lemmas(const ModelParams& p, int resolution = 200);

}  // namespace ruin
