#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace ruin {

/// Standard normal variates for one Monte Carlo path.
///
/// Each path owns an independent stream keyed by (seed, path_index), so
/// results never depend on how paths are split across workers.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t path_index);

  double operator()() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
};

/// Number of worker threads to use; 0 means hardware concurrency.
unsigned resolve_workers(unsigned requested);

/// Runs body(begin, end) over contiguous chunks of [0, n) on `workers` threads.
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace ruin
