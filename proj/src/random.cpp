#include "ruin/random.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace ruin {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t path_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path_index),
                    static_cast<std::uint32_t>(path_index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t path_index)
    : engine_(make_engine(seed, path_index)) {}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t w = std::min<std::size_t>(resolve_workers(workers), n);
  if (w == 1) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + w - 1) / w;
  std::vector<std::jthread> threads;
  threads.reserve(w);
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    threads.emplace_back(body, begin, std::min(n, begin + chunk));
  }
}

}  // namespace ruin
