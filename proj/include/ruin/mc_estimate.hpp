#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

namespace ruin {

struct MCEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t seed = 0;

  /// Proportion of `successes` among `n` trials with sqrt(p(1-p)/n) error.
  static MCEstimate bernoulli(std::size_t successes, std::size_t n, std::uint64_t seed);
  /// Sample mean with the usual standard error of the mean.
  static MCEstimate from_samples(const Eigen::Ref<const Eigen::ArrayXd>& samples,
                                 std::uint64_t seed);
};

}  // namespace ruin
