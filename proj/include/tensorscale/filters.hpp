// Gaussian, scale-normalized Gaussian derivative, and ring filter kernels.
#pragma once

#include "tensorscale/grid.hpp"

namespace tensorscale {

/// Truncation radius shared by every Gaussian-based kernel: ceil(4 sigma).
Index gaussian_radius(double sigma);

/// Sampled Gaussian with unit tap sum.
Kernel1D gaussian_kernel(double sigma);

/// Sampled first Gaussian derivative scaled by sigma^gamma. Taps are ordered
/// for correlation, so a rising edge gives a positive response. Tap sum is
/// exactly zero.
Kernel1D gaussian_derivative_kernel(double sigma, double gamma);

/// Separable difference of two unnormalized Gaussians, exp(-x^2/2s^2) -
/// exp(-x^2/2(ks)^2), rescaled to unit sum. Zero at the center, nonnegative
/// elsewhere, peaked on a shell of radius ring_peak_radius(sigma_r, k).
class RingSpec {
 public:
  RingSpec(double sigma_r, double k, int rank);

  double sigma_r() const { return sigma_r_; }
  double k() const { return k_; }
  int rank() const { return rank_; }
  /// Unit-sum divisor: prod(outer tap sums) - prod(inner tap sums).
  double normalization() const { return normalization_; }
  const Kernel1D& outer() const { return outer_; }
  const Kernel1D& inner() const { return inner_; }

  /// Weight of the assembled N-D kernel at an integer offset.
  double weight(std::span<const Index> offset) const;

 private:
  double sigma_r_;
  double k_;
  int rank_;
  Kernel1D outer_;
  Kernel1D inner_;
  double normalization_;
};

ScalarField apply_ring(const ScalarField& field, const RingSpec& ring);

}  // namespace tensorscale
