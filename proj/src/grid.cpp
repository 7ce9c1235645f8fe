#include "tensorscale/grid.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "parallel.hpp"

namespace tensorscale {

namespace {
std::atomic<int> g_threads{1};
}  // namespace

void set_thread_count(int threads) { g_threads = std::max(1, threads); }
int thread_count() { return g_threads.load(); }

Kernel1D::Kernel1D(Eigen::ArrayXd taps) : taps_(std::move(taps)) {
  if (taps_.size() == 0 || taps_.size() % 2 == 0)
    throw SizeError("kernel length must be odd");
  if (!taps_.isFinite().all()) throw NumericalError("kernel taps must be finite");
}

Index mirror_index(Index i, Index n) {
  if (n == 1) return 0;
  const Index period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

ScalarField convolve_axis(const ScalarField& field, const Kernel1D& kernel, int axis,
                          BoundaryRule /*boundary*/) {
  if (axis < 0 || axis >= field.rank()) throw ShapeError("convolution axis out of range");

  const Shape& shape = field.shape();
  const Index n = shape[axis];
  const Index inner = shape.stride(axis);
  const Index outer = shape.size() / (n * inner);
  const Index r = kernel.radius();
  const double* taps = kernel.taps().data();

  // Odd kernels (derivatives) are summed as tap * (right - left) so constant
  // input gives exactly zero rather than rounding noise.
  bool odd = r > 0 && taps[r] == 0.0;
  for (Index j = 1; odd && j <= r; ++j) odd = taps[r + j] == -taps[r - j];

  // Source line index for every (output index, tap) pair, shared by all lines.
  std::vector<Index> source(static_cast<std::size_t>(n * (2 * r + 1)));
  for (Index i = 0; i < n; ++i)
    for (Index j = -r; j <= r; ++j) source[static_cast<std::size_t>(i * (2 * r + 1) + j + r)] = mirror_index(i + j, n);

  ScalarField out(shape);
  const double* in = field.data();
  double* dst = out.data();

  if (inner == 1) {
    // Contiguous lines: gather a padded copy and run a dot product per sample.
    parallel_for(outer, [&](Index o) {
      Eigen::ArrayXd padded(n + 2 * r);
      const double* line = in + o * n;
      for (Index p = 0; p < n + 2 * r; ++p) padded[p] = line[mirror_index(p - r, n)];
      double* out_line = dst + o * n;
      for (Index i = 0; i < n; ++i) {
        double acc = 0.0;
        if (odd) {
          for (Index j = 1; j <= r; ++j) acc += taps[r + j] * (padded[i + r + j] - padded[i + r - j]);
        } else {
          for (Index k = 0; k < 2 * r + 1; ++k) acc += taps[k] * padded[i + k];
        }
        out_line[i] = acc;
      }
    });
  } else {
    // Strided lines: accumulate whole contiguous rows of `inner` samples.
    parallel_for(outer * n, [&](Index oi) {
      const Index o = oi / n;
      const Index i = oi % n;
      Eigen::Map<Eigen::ArrayXd> acc(dst + (o * n + i) * inner, inner);
      acc.setZero();
      const Index* src = source.data() + i * (2 * r + 1);
      const auto row = [&](Index k) { return Eigen::Map<const Eigen::ArrayXd>(in + (o * n + src[k]) * inner, inner); };
      if (odd) {
        for (Index j = 1; j <= r; ++j) acc += taps[r + j] * (row(r + j) - row(r - j));
      } else {
        for (Index k = 0; k < 2 * r + 1; ++k) acc += taps[k] * row(k);
      }
    });
  }
  return out;
}

ScalarField convolve_separable(const ScalarField& field, std::span<const Kernel1D> kernels,
                               BoundaryRule boundary) {
  if (static_cast<int>(kernels.size()) != field.rank())
    throw ShapeError("separable convolution needs one kernel per axis");
  ScalarField out = convolve_axis(field, kernels[0], 0, boundary);
  for (int axis = 1; axis < field.rank(); ++axis)
    out = convolve_axis(out, kernels[static_cast<std::size_t>(axis)], axis, boundary);
  return out;
}

}  // namespace tensorscale
