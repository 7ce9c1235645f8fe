#include "tensorscale/scalecalc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tensorscale {

namespace {

constexpr double kInvE = 1.0 / std::numbers::e;

// Starting guess for W_{-1}: branch-point series near -1/e, log asymptotics
// near 0.
double lambert_w_m1_guess(double x) {
  if (x < -0.25) {
    const double p = -std::sqrt(2.0 * (std::numbers::e * x + 1.0));
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  }
  const double l1 = std::log(-x);
  const double l2 = std::log(-l1);
  return l1 - l2 + l2 / l1;
}

double clamped_acos(double v) { return std::acos(std::clamp(v, -1.0, 1.0)); }

}  // namespace

GammaParams GammaParams::from_gamma(double gamma) { return {gamma, gamma_to_t(gamma)}; }

double lambert_w_m1(double x) {
  if (!(x >= -kInvE && x < 0.0)) throw DomainError("lambert_w_m1: x must lie in [-1/e, 0)");
  if (x == -kInvE) return -1.0;

  // w e^w decreases monotonically on (-inf, -1]; keep a bracket [lo, hi]
  // with f(lo) >= 0 >= f(hi) for f(w) = w e^w - x.
  auto f = [x](double w) { return w * std::exp(w) - x; };
  double hi = -1.0;
  double lo = -2.0;
  while (f(lo) < 0.0) lo *= 2.0;

  double w = std::clamp(lambert_w_m1_guess(x), lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double fw = f(w);
    if (fw == 0.0) return w;
    (fw > 0.0 ? lo : hi) = w;

    // Halley step on w e^w - x, falling back to bisection outside the bracket.
    const double ew = std::exp(w);
    const double d1 = (w + 1.0) * ew;
    const double d2 = (w + 2.0) * ew;
    double next = w - 2.0 * fw * d1 / (2.0 * d1 * d1 - fw * d2);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(w)) {
      w = next;
      break;
    }
    w = next;
  }
  return w;
}

double gamma_to_t(double gamma) {
  if (!(gamma > 1.0 && gamma < 3.0))
    throw DomainError("gamma_to_t: gamma must lie in (1, 3)");
  const double half = (1.0 - gamma) / 2.0;
  const double w = lambert_w_m1(half * std::exp(half));
  return 1.0 / std::sqrt(1.0 - gamma - 2.0 * w);
}

double t_to_gamma(double t) {
  if (!(t > 0.0)) throw DomainError("t_to_gamma: t must be positive");
  const double inv = 1.0 / (2.0 * t * t);
  // exp overflows long before the result departs from 1 in double precision.
  if (inv > 700.0) return 1.0;
  return 1.0 / (t * t * std::expm1(inv)) + 1.0;
}

double rect_response(double x_f, double sigma, double gamma) {
  if (!(x_f > 0.0 && sigma > 0.0)) throw DomainError("rect_response: x_f and sigma must be positive");
  const double prefactor = 4.0 * std::pow(sigma, gamma - 1.0) / std::sqrt(2.0 * std::numbers::pi);
  return prefactor * -std::expm1(-x_f * x_f / (2.0 * sigma * sigma));
}

double ring_peak_radius(double sigma_r, double k) {
  if (!(sigma_r > 0.0)) throw DomainError("ring_peak_radius: sigma_r must be positive");
  if (!(k > 0.0 && k < 1.0)) throw DomainError("ring_peak_radius: k must lie in (0, 1)");
  const double k2 = k * k;
  return sigma_r * k * std::sqrt(2.0 * std::log(k2) / (k2 - 1.0));
}

double sigma_r_from_scale(double sigma_star, double k, double t) {
  if (!(sigma_star > 0.0)) throw DomainError("sigma_r_from_scale: scale must be positive");
  if (!(t > 0.0 && t < 1.0)) throw DomainError("sigma_r_from_scale: t must lie in (0, 1)");
  return sigma_star / (2.0 * t * ring_peak_radius(1.0, k));
}

double circular_segment_area(double x, double r) {
  if (!(r > 0.0) || !(x >= 0.0) || x > r)
    throw DomainError("circular_segment_area: need 0 <= x <= r, r > 0");
  return r * r * std::acos(x / r) - x * std::sqrt(r * r - x * x);
}

double ring_line_gradient(double psi, double a_r, double w_r, double w_x) {
  const double outer = a_r + w_r;
  const double inner = a_r - w_r;
  return outer * clamped_acos((psi - w_x) / outer) - outer * clamped_acos((psi + w_x) / outer) -
         inner * clamped_acos((psi - w_x) / inner) + inner * clamped_acos((psi + w_x) / inner);
}

double ring_line_gradient_scaled(double x_c, double sigma, double a_r, double w_r, double w_x) {
  const double x1 = x_c - sigma * w_x;
  const double x2 = x_c + sigma * w_x;
  const double r1 = sigma * a_r - sigma * w_r;
  const double r2 = sigma * a_r + sigma * w_r;
  return 2.0 * r2 * clamped_acos(x1 / r2) - 2.0 * r2 * clamped_acos(x2 / r2) -
         2.0 * r1 * clamped_acos(x1 / r1) + 2.0 * r1 * clamped_acos(x2 / r1);
}

double ring_line_ratio(double a_r, double w_r, double w_x) {
  if (!(w_r > 0.0 && a_r > w_r && w_x > 0.0))
    throw DomainError("ring_line_ratio: need a_r > w_r > 0 and w_x > 0");

  auto g = [&](double psi) { return ring_line_gradient(psi, a_r, w_r, w_x); };
  const double upper = a_r + w_r + w_x;
  double lo = 0.0;
  if (!(g(lo) < 0.0)) throw NumericalError("ring_line_ratio: gradient not negative at psi = 0");

  // The gradient returns to exactly zero once the line leaves the ring, so
  // scan for the first positive sample instead of using the interval end.
  constexpr int kScan = 4096;
  double hi = -1.0;
  for (int i = 1; i <= kScan; ++i) {
    const double psi = upper * i / kScan;
    if (g(psi) > 0.0) {
      hi = psi;
      break;
    }
    lo = psi;
  }
  if (hi < 0.0) throw NumericalError("ring_line_ratio: no sign change in bracket");

  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace tensorscale
