#pragma once

#include <thread>
#include <vector>

#include "tensorscale/grid.hpp"

namespace tensorscale {

// Runs body(i) for i in [0, count) on thread_count() workers. Each index is
// handled by exactly one worker, so outputs written per index are
// deterministic.
template <typename Body>
void parallel_for(Index count, Body&& body) {
  const Index workers = std::min<Index>(thread_count(), count);
  if (workers <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const Index begin = count * w / workers;
      const Index end = count * (w + 1) / workers;
      for (Index i = begin; i < end; ++i) body(i);
    });
  }
}

}  // namespace tensorscale
