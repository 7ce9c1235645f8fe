// Independent reference implementations used by the tests. These are slow and
// written for clarity; none of them calls into the library's filtering code.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "tensorscale/grid.hpp"

namespace oracle {

using tensorscale::Index;
using tensorscale::ScalarField;
using tensorscale::Shape;

/// Reflects without repeating the edge sample, as often as needed.
inline Index reflect(Index i, Index n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

inline ScalarField random_field(const Shape& shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  ScalarField f(shape);
  for (Index p = 0; p < f.size(); ++p) f[p] = dist(rng);
  return f;
}

/// Position (per axis) of a flat sample index.
inline std::vector<Index> coords(const Shape& s, Index p) {
  std::vector<Index> c(static_cast<std::size_t>(s.rank()));
  for (int a = s.rank() - 1; a >= 0; --a) {
    c[static_cast<std::size_t>(a)] = p % s[a];
    p /= s[a];
  }
  return c;
}

inline Index flat(const Shape& s, const std::vector<Index>& c) {
  Index p = 0;
  for (int a = 0; a < s.rank(); ++a) p = p * s[a] + c[static_cast<std::size_t>(a)];
  return p;
}

/// Dense N-D correlation with an arbitrary kernel given as weight(offset)
/// over the box [-radius, radius]^N, mirror boundary.
inline ScalarField dense_correlate(const ScalarField& f, const std::vector<Index>& radius,
                                   const std::function<double(const std::vector<Index>&)>& weight) {
  const Shape& s = f.shape();
  const int rank = s.rank();
  ScalarField out(s);
  std::vector<Index> off(static_cast<std::size_t>(rank));
  for (Index p = 0; p < f.size(); ++p) {
    const auto c = coords(s, p);
    double acc = 0.0;
    for (int a = 0; a < rank; ++a) off[static_cast<std::size_t>(a)] = -radius[static_cast<std::size_t>(a)];
    while (true) {
      std::vector<Index> q(static_cast<std::size_t>(rank));
      for (int a = 0; a < rank; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        q[ua] = reflect(c[ua] + off[ua], s[a]);
      }
      acc += weight(off) * f[flat(s, q)];
      int a = rank - 1;
      for (; a >= 0; --a) {
        const auto ua = static_cast<std::size_t>(a);
        if (++off[ua] <= radius[ua]) break;
        off[ua] = -radius[ua];
      }
      if (a < 0) break;
    }
    out[p] = acc;
  }
  return out;
}

/// 1D correlation along one axis by explicit mirror padding of each line.
inline ScalarField padded_correlate_axis(const ScalarField& f, const Eigen::ArrayXd& taps, int axis) {
  const Index r = (taps.size() - 1) / 2;
  const Shape& s = f.shape();
  ScalarField out(s);
  for (Index p = 0; p < f.size(); ++p) {
    auto c = coords(s, p);
    const Index i0 = c[static_cast<std::size_t>(axis)];
    double acc = 0.0;
    for (Index j = -r; j <= r; ++j) {
      c[static_cast<std::size_t>(axis)] = reflect(i0 + j, s[axis]);
      acc += taps[r + j] * f[flat(s, c)];
    }
    out[p] = acc;
  }
  return out;
}

/// Cyclic Jacobi eigenvalue iteration for small symmetric matrices.
/// Returns ascending eigenvalues and matching eigenvector columns.
template <int N>
std::pair<Eigen::Matrix<double, N, 1>, Eigen::Matrix<double, N, N>> jacobi(Eigen::Matrix<double, N, N> a,
                                                                             int sweeps = 50) {
  Eigen::Matrix<double, N, N> v = Eigen::Matrix<double, N, N>::Identity();
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < N; ++p)
      for (int q = p + 1; q < N; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-300) break;
    for (int p = 0; p < N; ++p)
      for (int q = p + 1; q < N; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Eigen::Matrix<double, N, N> j = Eigen::Matrix<double, N, N>::Identity();
        j(p, p) = c;
        j(q, q) = c;
        j(p, q) = s;
        j(q, p) = -s;
        a = j.transpose() * a * j;
        v = v * j;
      }
  }
  std::array<int, N> order;
  for (int i = 0; i < N; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
  Eigen::Matrix<double, N, 1> lambdas;
  Eigen::Matrix<double, N, N> vectors;
  for (int i = 0; i < N; ++i) {
    lambdas[i] = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return {lambdas, vectors};
}

/// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 50) {
  const auto step = [&](auto&& self, double lo, double hi, double flo, double fmid, double fhi, double whole,
                        double eps, int level) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid);
    const double rm = 0.5 * (mid + hi);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (level <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
      return left + right + (left + right - whole) / 15.0;
    return self(self, lo, mid, flo, flm, fmid, left, eps / 2, level - 1) +
           self(self, mid, hi, fmid, frm, fhi, right, eps / 2, level - 1);
  };
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return step(step, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

/// Axial angle between two vectors in degrees.
template <typename V>
double axial_degrees(const V& a, const V& b) {
  const double d = std::abs(a.normalized().dot(b.normalized()));
  return std::acos(std::min(1.0, d)) * 180.0 / M_PI;
}

}  // namespace oracle
