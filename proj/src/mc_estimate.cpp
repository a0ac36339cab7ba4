#include "ruin/mc_estimate.hpp"

#include <algorithm>
#include <cmath>

namespace ruin {

namespace {
constexpr double kZ95 = 1.959963984540054;
}

MCEstimate MCEstimate::bernoulli(std::size_t successes, std::size_t n, std::uint64_t seed) {
  MCEstimate e;
  e.n = n;
  e.seed = seed;
  if (n == 0) return e;
  e.estimate = static_cast<double>(successes) / static_cast<double>(n);
  e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(n));
  e.ci_low = std::max(0.0, e.estimate - kZ95 * e.std_error);
  e.ci_high = std::min(1.0, e.estimate + kZ95 * e.std_error);
  return e;
}

MCEstimate MCEstimate::from_samples(const Eigen::Ref<const Eigen::ArrayXd>& samples,
                                    std::uint64_t seed) {
  MCEstimate e;
  e.n = static_cast<std::size_t>(samples.size());
  e.seed = seed;
  if (e.n == 0) return e;
  e.estimate = samples.mean();
  if (e.n > 1) {
    const double var = (samples - e.estimate).square().sum() / static_cast<double>(e.n - 1);
    e.std_error = std::sqrt(var / static_cast<double>(e.n));
  }
  e.ci_low = e.estimate - kZ95 * e.std_error;
  e.ci_high = e.estimate + kZ95 * e.std_error;
  return e;
}

}  // namespace ruin
