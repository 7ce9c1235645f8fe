// Closed-form scale relations between filters and features.
#pragma once

#include "tensorscale/errors.hpp"

namespace tensorscale {

/// Shared filter constants. `t` is the filter-to-feature ratio sigma*/x_f
/// implied by `gamma`.
struct GammaParams {
  double gamma = 1.2;
  double t = 0.372;

  /// Builds a consistent pair with t computed from gamma.
  static GammaParams from_gamma(double gamma);
};

/// Default ring inner/outer size ratio.
inline constexpr double kDefaultRingRatio = 0.999;

/// Lower real branch W_{-1} of the Lambert W function, x in [-1/e, 0).
double lambert_w_m1(double x);

/// Filter-to-feature ratio t = sigma*/x_f maximizing the gamma-normalized
/// edge response of a rectangular feature. gamma in (1, 3].
double gamma_to_t(double gamma);

/// Inverse of gamma_to_t: gamma = 1 / (t^2 (exp(1/(2t^2)) - 1)) + 1.
double t_to_gamma(double t);

/// Summed gamma-normalized first-derivative response at the rising edge of a
/// rectangle of width x_f: (4 sigma^(gamma-1) / sqrt(2 pi)) (1 - exp(-x_f^2 / (2 sigma^2))).
double rect_response(double x_f, double sigma, double gamma);

/// Positive radius where exp(-x^2/2s^2) - exp(-x^2/2(ks)^2) peaks.
double ring_peak_radius(double sigma_r, double k);

/// Ring sigma whose diameter matches the feature width detected at sigma_star.
double sigma_r_from_scale(double sigma_star, double k, double t);

/// Area of the circular segment of a radius-r disk beyond the chord at x.
double circular_segment_area(double x, double r);

/// Derivative of the binary ring/line overlap with respect to the ring
/// radius, in units where the scale is 1. psi is line distance / scale.
double ring_line_gradient(double psi, double a_r, double w_r, double w_x);

/// Same gradient written with an explicit scale; the root in x_c/sigma does
/// not depend on sigma.
double ring_line_gradient_scaled(double x_c, double sigma, double a_r, double w_r, double w_x);

/// Root psi of ring_line_gradient on (0, a_r + w_r + w_x).
double ring_line_ratio(double a_r, double w_r, double w_x);

}  // namespace tensorscale
