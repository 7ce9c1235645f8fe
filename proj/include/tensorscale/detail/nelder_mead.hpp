#pragma once

#include <algorithm>
#include <array>
#include <numeric>

namespace tensorscale {

template <std::size_t N, typename Objective>
std::array<double, N> nelder_mead(Objective&& objective, std::array<double, N> start,
                                  double initial_step, int max_iterations) {
  using Point = std::array<double, N>;
  std::array<Point, N + 1> simplex;
  std::array<double, N + 1> values;
  simplex[0] = start;
  for (std::size_t i = 0; i < N; ++i) {
    simplex[i + 1] = start;
    const double step = start[i] != 0.0 ? initial_step * start[i] : initial_step;
    simplex[i + 1][i] += step;
  }
  for (std::size_t i = 0; i <= N; ++i) values[i] = objective(simplex[i]);

  auto blend = [](const Point& a, const Point& b, double w) {
    Point p;
    for (std::size_t i = 0; i < N; ++i) p[i] = a[i] + w * (b[i] - a[i]);
    return p;
  };

  std::array<std::size_t, N + 1> order;
  for (int iter = 0; iter < max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[N - 1];
    if (values[worst] - values[best] <= 1e-14 * (std::abs(values[best]) + 1e-300)) break;

    Point centroid{};
    for (std::size_t i = 0; i <= N; ++i)
      if (i != worst)
        for (std::size_t d = 0; d < N; ++d) centroid[d] += simplex[i][d] / double(N);

    const Point reflected = blend(centroid, simplex[worst], -1.0);
    const double f_reflected = objective(reflected);
    if (f_reflected < values[best]) {
      const Point expanded = blend(centroid, simplex[worst], -2.0);
      const double f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    const Point contracted = blend(centroid, outside ? reflected : simplex[worst], 0.5);
    const double f_contracted = objective(contracted);
    if (f_contracted < std::min(f_reflected, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    for (std::size_t i = 0; i <= N; ++i) {
      if (i == best) continue;
      simplex[i] = blend(simplex[best], simplex[i], 0.5);
      values[i] = objective(simplex[i]);
    }
  }
  const auto best = std::min_element(values.begin(), values.end()) - values.begin();
  return simplex[static_cast<std::size_t>(best)];
}

}  // namespace tensorscale
