#include "ruin/gauss_constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "ruin/random.hpp"

namespace ruin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// How often (in grid steps) a path tests the tail cut-off.
constexpr Eigen::Index kTailCheckEvery = 16;

struct Window {
  const ConstantSpec* spec;
  Eigen::Index end;      // last fine index of the reported interval
  Eigen::Index ext_end;  // last fine index of the extended interval
  Eigen::ArrayXd drift;  // D(t_k), k <= ext_end
  Eigen::ArrayXd slope;  // D'(t_k)
};

std::string format_interval(double s1, double s2) {
  std::ostringstream os;
  os << '[' << s1 << ',';
  if (s2 == kInf) os << "inf)";
  else os << s2 << ']';
  return os.str();
}

Eigen::Index window_end(const ConstantSpec& spec, const EstimatorConfig& cfg, double h) {
  if (!spec.infinite()) {
    return static_cast<Eigen::Index>(std::floor((spec.s2 - spec.s1) / h + 1e-9));
  }
  double horizon = cfg.truncation_horizon ? *cfg.truncation_horizon : auto_truncation_horizon(spec);
  if (!(horizon > spec.s1) || !(spec.drift(horizon) > kTruncationDriftLevel) ||
      !(spec.drift_slope(horizon) > 0.0)) {
    std::ostringstream os;
    os << "truncation check failed for " << spec.describe() << ": horizon " << horizon
       << " leaves the deterministic exponent at " << -spec.drift(horizon) << " (must be < "
       << -kTruncationDriftLevel << ")";
    throw std::runtime_error(os.str());
  }
  return static_cast<Eigen::Index>(std::ceil((horizon - spec.s1) / h - 1e-9));
}

}  // namespace

ConstantSpec ConstantSpec::pickands(double s1, double s2) {
  return {ConstantFamily::pickands, 0.0, 0.0, 0.0, s1, s2};
}

ConstantSpec ConstantSpec::piterbarg(double a, double s1, double s2) {
  return {ConstantFamily::piterbarg, a, 0.0, 0.0, s1, s2};
}

ConstantSpec ConstantSpec::generalized_phat(double f, double b, double s1, double s2) {
  return {ConstantFamily::generalized_phat, 0.0, f, b, s1, s2};
}

ConstantSpec ConstantSpec::ptilde(double b) {
  return {ConstantFamily::ptilde, 0.0, 0.0, b, 0.0, kInf};
}

double ConstantSpec::drift(double t) const {
  switch (family) {
    case ConstantFamily::pickands:
      return t;
    case ConstantFamily::piterbarg:
      return (1.0 + a) * t;
    case ConstantFamily::generalized_phat: {
      const double d = std::sqrt(t) - std::sqrt(b);
      return t + f * d * d;
    }
    case ConstantFamily::ptilde:
      return 2.0 * t - 2.0 * std::sqrt(b * t);
  }
  return 0.0;
}

double ConstantSpec::drift_slope(double t) const {
  switch (family) {
    case ConstantFamily::pickands:
      return 1.0;
    case ConstantFamily::piterbarg:
      return 1.0 + a;
    case ConstantFamily::generalized_phat:
      if (t == 0.0) return (b > 0.0 && f > 0.0) ? -kInf : 1.0 + f;
      return 1.0 + f * (1.0 - std::sqrt(b / t));
    case ConstantFamily::ptilde:
      if (t == 0.0) return b > 0.0 ? -kInf : 2.0;
      return 2.0 - std::sqrt(b / t);
  }
  return 0.0;
}

void ConstantSpec::validate() const {
  auto fail = [this](const std::string& what) {
    throw std::invalid_argument("invalid constant " + describe() + ": " + what);
  };
  if (!(s1 >= 0.0) || !std::isfinite(s1)) fail("s1 must be finite and >= 0");
  if (!(s2 >= s1)) fail("s2 >= s1 required");
  switch (family) {
    case ConstantFamily::pickands:
      if (infinite()) fail("E sup over [s1, inf) is infinite for the Pickands functional");
      break;
    case ConstantFamily::piterbarg:
      if (!(a > 0.0)) fail("a > 0 required");
      break;
    case ConstantFamily::generalized_phat:
      if (!(f >= 0.0) || !(b >= 0.0)) fail("f >= 0 and b >= 0 required");
      if (infinite() && f == 0.0) fail("f = 0 reduces to the Pickands functional, infinite on [s1, inf)");
      break;
    case ConstantFamily::ptilde:
      if (!(b >= 0.0)) fail("b >= 0 required");
      if (s1 != 0.0 || !infinite()) fail("defined on [0, inf) only");
      break;
  }
}

std::string ConstantSpec::describe() const {
  std::ostringstream os;
  switch (family) {
    case ConstantFamily::pickands:
      os << "H";
      break;
    case ConstantFamily::piterbarg:
      os << "P^" << a;
      break;
    case ConstantFamily::generalized_phat:
      os << "Phat^{" << f << ',' << b << '}';
      break;
    case ConstantFamily::ptilde:
      os << "Ptilde^" << b;
      break;
  }
  os << format_interval(s1, s2);
  return os.str();
}

double auto_truncation_horizon(const ConstantSpec& spec) {
  spec.validate();
  if (!spec.infinite()) throw std::invalid_argument("auto_truncation_horizon: interval is finite");
  // Drifts are convex, so once above the level and increasing they stay above.
  auto past = [&](double t) {
    return spec.drift(t) > kTruncationDriftLevel && spec.drift_slope(t) > 0.0;
  };
  double hi = std::max(spec.s1, 1.0);
  while (!past(hi)) {
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("auto_truncation_horizon: drift never reaches level");
  }
  double lo = std::max(spec.s1, hi / 2.0);
  if (past(lo)) return lo;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (past(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<ConstantEstimate> estimate_constants(std::span<const ConstantSpec> specs,
                                                 const EstimatorConfig& cfg) {
  if (specs.empty()) return {};
  if (cfg.n_paths < 2) throw std::invalid_argument("estimate_constants: n_paths >= 2 required");
  if (!(cfg.step > 0.0)) throw std::invalid_argument("estimate_constants: step > 0 required");
  if (!(cfg.tail_tolerance >= 0.0 && cfg.tail_tolerance < 1.0))
    throw std::invalid_argument("estimate_constants: tail_tolerance in [0, 1) required");
  const double s1 = specs.front().s1;
  for (const auto& spec : specs) {
    spec.validate();
    if (spec.s1 != s1) throw std::invalid_argument("estimate_constants: all specs must share s1");
  }

  const bool refine = cfg.refinement_checks;
  const double h = refine ? 0.5 * cfg.step : cfg.step;

  std::vector<Window> windows;
  windows.reserve(specs.size());
  Eigen::Index last = 0;
  for (const auto& spec : specs) {
    Window w{&spec, window_end(spec, cfg, h), 0, {}, {}};
    w.ext_end = (spec.infinite() && refine) ? 2 * w.end : w.end;
    w.drift.resize(w.ext_end + 1);
    w.slope.resize(w.ext_end + 1);
    for (Eigen::Index k = 0; k <= w.ext_end; ++k) {
      const double t = s1 + h * static_cast<double>(k);
      w.drift(k) = spec.drift(t);
      w.slope(k) = spec.drift_slope(t);
    }
    last = std::max(last, w.ext_end);
    windows.push_back(std::move(w));
  }

  const auto n = static_cast<Eigen::Index>(cfg.n_paths);
  const auto m = static_cast<Eigen::Index>(windows.size());
  // Per path and window: exp(sup) on the fine grid, the coarse subgrid, and
  // the extended interval.
  Eigen::ArrayXXd results(n, 3 * m);
  const double log_tol = cfg.tail_tolerance > 0.0 ? std::log(cfg.tail_tolerance) : 0.0;

  parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> fine(m), coarse(m), fine_at_end(m), coarse_at_end(m);
    for (std::size_t path = begin; path < end; ++path) {
      NormalStream normal(cfg.seed, path);
      std::fill(fine.begin(), fine.end(), -kInf);
      std::fill(coarse.begin(), coarse.end(), -kInf);
      const double sqrt_h = std::sqrt(h);
      double b_t = s1 > 0.0 ? std::sqrt(s1) * normal() : 0.0;
      Eigen::Index k = 0;
      for (;; ++k) {
        if (k > 0) b_t += sqrt_h * normal();
        const double w = std::numbers::sqrt2 * b_t;
        const bool even = (k & 1) == 0;
        for (Eigen::Index j = 0; j < m; ++j) {
          const Window& win = windows[j];
          if (k > win.ext_end) continue;
          const double e = w - win.drift(k);
          if (k <= win.end || !refine) {
            fine[j] = std::max(fine[j], e);
            if (even) coarse[j] = std::max(coarse[j], e);
          } else {
            fine[j] = std::max(fine[j], e);
          }
          if (k == win.end) {
            fine_at_end[j] = fine[j];
            coarse_at_end[j] = coarse[j];
          }
        }
        if (k >= last) break;
        if (log_tol < 0.0 && k > 0 && k % kTailCheckEvery == 0) {
          // exp(sup beyond t_k) exceeds exp(M) by, in expectation, at most
          // exp(M) e^{-mu (M - e_k)} / (mu - 1) for a convex drift of slope mu.
          bool negligible = true;
          for (Eigen::Index j = 0; j < m && negligible; ++j) {
            const Window& win = windows[j];
            if (k >= win.ext_end) continue;
            const double mu = win.slope(k);
            const double ref = refine ? coarse[j] : fine[j];
            negligible = mu > 1.0 &&
                         mu * (ref - (w - win.drift(k))) + log_tol + std::log(mu - 1.0) > 0.0;
          }
          if (negligible) break;
        }
      }
      const auto row = static_cast<Eigen::Index>(path);
      for (Eigen::Index j = 0; j < m; ++j) {
        const bool reached_end = k >= windows[j].end;
        const double f_end = reached_end ? fine_at_end[j] : fine[j];
        const double c_end = reached_end ? coarse_at_end[j] : coarse[j];
        results(row, 3 * j) = std::exp(f_end);
        results(row, 3 * j + 1) = refine ? std::exp(c_end) : std::exp(f_end);
        results(row, 3 * j + 2) = std::exp(fine[j]);
      }
    }
  });

  std::vector<ConstantEstimate> out;
  out.reserve(windows.size());
  for (Eigen::Index j = 0; j < m; ++j) {
    const Window& win = windows[j];
    const ConstantSpec& spec = *win.spec;
    ConstantEstimate est;
    est.spec = spec;
    est.step = h;
    est.coarse_step = refine ? cfg.step : h;
    est.value = MCEstimate::from_samples(results.col(3 * j), cfg.seed);
    est.coarse = MCEstimate::from_samples(results.col(3 * j + 1), cfg.seed);
    const Eigen::ArrayXd shift = results.col(3 * j) - results.col(3 * j + 1);
    const MCEstimate shift_est = MCEstimate::from_samples(shift, cfg.seed);
    est.refinement_shift = shift_est.estimate;
    est.refinement_shift_std_error = shift_est.std_error;
    est.refinement_flag = refine && std::abs(est.refinement_shift) > 3.0 * est.value.std_error;
    est.extended = MCEstimate::from_samples(results.col(3 * j + 2), cfg.seed);
    if (spec.infinite()) {
      est.truncation_horizon = s1 + h * static_cast<double>(win.end);
      est.extension_shift = est.extended.estimate - est.value.estimate;
      est.extension_flag = refine && est.extension_shift >= est.value.std_error;
    }
    est.jensen_witness = std::exp((-win.drift.head(win.end + 1)).maxCoeff());
    est.single_point_value = std::exp(s1 - spec.drift(s1));
    out.push_back(std::move(est));
  }
  return out;
}

ConstantEstimate estimate_constant(const ConstantSpec& spec, const EstimatorConfig& cfg) {
  return estimate_constants(std::span<const ConstantSpec>(&spec, 1), cfg).front();
}

PhatPtildePair estimate_pair_phat_ptilde(double b, const EstimatorConfig& cfg) {
  if (!(b >= 0.0)) throw std::invalid_argument("estimate_pair_phat_ptilde: b >= 0 required");
  const std::vector<ConstantSpec> specs{ConstantSpec::generalized_phat(1.0, b, 0.0, kInf),
                                        ConstantSpec::ptilde(b)};
  // One truncation for both so the two exponents see identical grids.
  EstimatorConfig shared = cfg;
  if (!shared.truncation_horizon) shared.truncation_horizon = auto_truncation_horizon(specs[1]);
  auto est = estimate_constants(specs, shared);
  return {std::move(est[0]), std::move(est[1])};
}

MCEstimate pickands_shifted(double S, const EstimatorConfig& cfg) {
  if (!(S >= 0.0) || !std::isfinite(S)) throw std::invalid_argument("pickands_shifted: S must be finite and >= 0");
  if (!(cfg.step > 0.0)) throw std::invalid_argument("pickands_shifted: step must be > 0");
  if (cfg.n_paths < 2) throw std::invalid_argument("pickands_shifted: need at least 2 paths");
  const auto N = static_cast<std::size_t>(std::llround(S / cfg.step));
  const double h = N > 0 ? S / static_cast<double>(N) : 0.0;
  const double sd = std::numbers::sqrt2 * std::sqrt(h);
  Eigen::ArrayXd samples(static_cast<Eigen::Index>(cfg.n_paths));

  parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t path = begin; path < end; ++path) {
      NormalStream normal(cfg.seed, path);
      const double u = 0.5 * std::erfc(-normal() / std::numbers::sqrt2);
      const auto K = std::min(N, static_cast<std::size_t>(u * static_cast<double>(N + 1)));
      // max and log-sum-exp of W over both sides, W(0) = 0
      double mx = 0.0, lse = 0.0;
      auto push = [&](double w) {
        if (w > mx) {
          lse = w + std::log1p(std::exp(lse - w));
          mx = w;
        } else {
          lse = lse + std::log1p(std::exp(w - lse));
        }
      };
      for (int side = 0; side < 2; ++side) {
        const std::size_t steps = side == 0 ? K : N - K;
        double w = 0.0;
        for (std::size_t i = 0; i < steps; ++i) {
          w += sd * normal() - h;
          push(w);
        }
      }
      samples(static_cast<Eigen::Index>(path)) = static_cast<double>(N + 1) * std::exp(mx - lse);
    }
  });
  return MCEstimate::from_samples(samples, cfg.seed);
}

std::vector<PickandsRatio> pickands_rate_check(std::span<const double> S_list,
                                               const EstimatorConfig& cfg) {
  std::vector<ConstantSpec> specs;
  double prev = -1.0;
  for (double S : S_list) {
    if (!(S > prev)) throw std::invalid_argument("pickands_rate_check: S_list must be increasing");
    prev = S;
    specs.push_back(ConstantSpec::pickands(0.0, S));
  }
  auto est = estimate_constants(specs, cfg);
  std::vector<PickandsRatio> out;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double S = S_list[i];
    MCEstimate shifted = S > 0.0 ? pickands_shifted(S, cfg) : est[i].value;
    const double ratio = S > 0.0 ? shifted.estimate / S : std::numeric_limits<double>::quiet_NaN();
    out.push_back({S, std::move(est[i]), shifted, ratio});
  }
  return out;
}

}  // namespace ruin
