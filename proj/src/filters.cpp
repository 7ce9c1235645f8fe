#include "tensorscale/filters.hpp"

#include <cmath>
#include <numbers>

#include "tensorscale/scalecalc.hpp"

namespace tensorscale {

namespace {

// exp(-x^2 / 2 s^2) at integer offsets [-radius, radius].
Eigen::ArrayXd unnormalized_gaussian(double sigma, Index radius) {
  Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(2 * radius + 1, double(-radius), double(radius));
  return (-x.square() / (2.0 * sigma * sigma)).exp();
}

}  // namespace

Index gaussian_radius(double sigma) { return static_cast<Index>(std::ceil(4.0 * sigma)); }

Kernel1D gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw DomainError("gaussian_kernel: sigma must be positive");
  Eigen::ArrayXd taps = unnormalized_gaussian(sigma, gaussian_radius(sigma));
  return Kernel1D(taps / taps.sum());
}

Kernel1D gaussian_derivative_kernel(double sigma, double gamma) {
  if (!(sigma > 0.0)) throw DomainError("gaussian_derivative_kernel: sigma must be positive");
  if (!(gamma >= 1.0)) throw DomainError("gaussian_derivative_kernel: gamma must be >= 1");
  const Index r = gaussian_radius(sigma);
  const double norm = std::pow(sigma, gamma) / (sigma * std::sqrt(2.0 * std::numbers::pi));

  // Build the positive half and mirror it with a sign flip so the taps are
  // exactly antisymmetric.
  Eigen::ArrayXd taps = Eigen::ArrayXd::Zero(2 * r + 1);
  for (Index j = 1; j <= r; ++j) {
    const double x = static_cast<double>(j);
    const double v = norm * x / (sigma * sigma) * std::exp(-x * x / (2.0 * sigma * sigma));
    taps[r + j] = v;
    taps[r - j] = -v;
  }
  double sum = 0.0;
  for (Index j = 1; j <= r; ++j) sum += taps[r + j] + taps[r - j];
  taps -= sum / static_cast<double>(taps.size());
  return Kernel1D(taps);
}

RingSpec::RingSpec(double sigma_r, double k, int rank) : sigma_r_(sigma_r), k_(k), rank_(rank) {
  if (!(sigma_r > 0.0)) throw DomainError("RingSpec: sigma_r must be positive");
  if (!(k > 0.0 && k < 1.0)) throw DomainError("RingSpec: k must lie in (0, 1)");
  if (rank < 2 || rank > 3) throw ShapeError("RingSpec: rank must be 2 or 3");
  // Both Gaussians share the outer truncation radius.
  const Index r = gaussian_radius(sigma_r);
  outer_ = Kernel1D(unnormalized_gaussian(sigma_r, r));
  inner_ = Kernel1D(unnormalized_gaussian(sigma_r * k, r));
  normalization_ = std::pow(outer_.sum(), rank) - std::pow(inner_.sum(), rank);
  if (!(normalization_ > 0.0)) throw NumericalError("RingSpec: degenerate ring normalization");
}

double RingSpec::weight(std::span<const Index> offset) const {
  double outer = 1.0;
  double inner = 1.0;
  for (Index j : offset) {
    if (std::abs(j) > outer_.radius()) return 0.0;
    outer *= outer_.at(j);
    inner *= inner_.at(j);
  }
  return (outer - inner) / normalization_;
}

ScalarField apply_ring(const ScalarField& field, const RingSpec& ring) {
  if (field.rank() != ring.rank()) throw ShapeError("apply_ring: rank mismatch");
  std::vector<Kernel1D> outer(static_cast<std::size_t>(field.rank()), ring.outer());
  std::vector<Kernel1D> inner(static_cast<std::size_t>(field.rank()), ring.inner());
  ScalarField out = convolve_separable(field, outer);
  out.array() -= convolve_separable(field, inner).array();
  out.array() /= ring.normalization();
  return out;
}

}  // namespace tensorscale
