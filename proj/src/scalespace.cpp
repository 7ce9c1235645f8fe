#include "tensorscale/scalespace.hpp"

#include <algorithm>
#include <cmath>

#include "tensorscale/calibrate.hpp"
#include "tensorscale/synth.hpp"

namespace tensorscale {

ScaleGrid::ScaleGrid(std::vector<double> sigmas, Spacing spacing)
    : sigmas_(std::move(sigmas)), spacing_(spacing) {
  if (sigmas_.size() < 1) throw DomainError("scale grid is empty");
  for (std::size_t i = 0; i < sigmas_.size(); ++i) {
    if (!(sigmas_[i] > 0.0) || !std::isfinite(sigmas_[i])) throw DomainError("scale grid values must be positive");
    if (i > 0 && !(sigmas_[i] > sigmas_[i - 1])) throw DomainError("scale grid must be strictly increasing");
  }
}

ScaleGrid ScaleGrid::linear(double sigma_min, double sigma_max, double step) {
  if (!(step > 0.0) || !(sigma_max >= sigma_min)) throw DomainError("invalid linear scale grid");
  std::vector<double> sigmas;
  for (Index i = 0;; ++i) {
    const double s = sigma_min + double(i) * step;
    if (s > sigma_max + 1e-9) break;
    sigmas.push_back(s);
  }
  return ScaleGrid(std::move(sigmas), Spacing::Linear);
}

ScaleGrid ScaleGrid::geometric(double sigma_min, double sigma_max, double ratio) {
  if (!(ratio > 1.0) || !(sigma_max >= sigma_min) || !(sigma_min > 0.0))
    throw DomainError("invalid geometric scale grid");
  std::vector<double> sigmas;
  for (Index i = 0;; ++i) {
    const double s = sigma_min * std::pow(ratio, double(i));
    if (s > sigma_max * (1.0 + 1e-9)) break;
    sigmas.push_back(s);
  }
  return ScaleGrid(std::move(sigmas), Spacing::Geometric);
}

Correction2D Correction2D::for_gamma(double gamma, double anis_ratio) {
  return {anis_ratio, gamma / (3.0 - gamma)};
}

ScaleSpaceResult sweep(const ScalarField& field, const ScaleGrid& grid, const SweepOptions& options) {
  if (!field.all_finite()) throw NumericalError("sweep: input field has non-finite samples");
  const int rank = field.rank();
  const GammaParams& params = options.params;

  ScaleSpaceResult result;
  result.scale = ScalarField(field.shape(), grid.min());
  bool first = true;
  for (double sigma : grid.sigmas()) {
    const RingSpec ring(sigma_r_from_scale(sigma, options.k, params.t), options.k, rank);
    TensorField tensor = structure_tensor(field, sigma, params.gamma, ring, options.post_smooth_sigma);
    ScalarField trace = tensor.trace();
    if (first) {
      result.best_trace = std::move(trace);
      result.tensor = std::move(tensor);
      first = false;
      continue;
    }
    // Strictly greater: equal traces keep the smaller scale.
    const Eigen::Array<bool, Eigen::Dynamic, 1> better = trace.array() > result.best_trace.array();
    result.scale.array() = better.select(sigma, result.scale.array());
    result.best_trace.array() = better.select(trace.array(), result.best_trace.array());
    for (std::size_t c = 0; c < tensor.channels.size(); ++c)
      result.tensor.channels[c].array() = better.select(tensor.channels[c].array(), result.tensor.channels[c].array());
  }

  result.eigen = eigendecompose(result.tensor);
  result.measures = rank == 2 ? measures_2d(result.eigen) : measures_3d(result.eigen);
  result.orientation = orientation(result.eigen);

  if (!options.correct) {
    result.corrected_scale = result.scale;
  } else if (rank == 2) {
    const double anis = options.anis_ratio.value_or(anis_ratio_for(params.gamma, options.k));
    result.corrected_scale =
        correct_scale_2d(result.scale, result.measures.anisotropy, Correction2D::for_gamma(params.gamma, anis));
  } else {
    result.corrected_scale = correct_scale_3d(result.scale, result.measures, options.correction_3d);
  }
  result.width = width_map(result.corrected_scale, params.t);
  return result;
}

ScalarField correct_scale_2d(const ScalarField& scale, const ScalarField& anisotropy, const Correction2D& c) {
  if (!(scale.shape() == anisotropy.shape())) throw ShapeError("correct_scale_2d: shape mismatch");
  const auto a = anisotropy.array();
  ScalarField out(scale.shape());
  out.array() = scale.array() / ((1.0 + (c.anis_ratio - 1.0) * a) * (1.0 - (1.0 - c.iso_ratio) * (1.0 - a)));
  return out;
}

ScalarField correct_scale_3d(const ScalarField& scale, const MeasureField& m, const Correction3D& c) {
  if (!(scale.shape() == m.sphericity.shape())) throw ShapeError("correct_scale_3d: shape mismatch");
  ScalarField out(scale.shape());
  out.array() = scale.array() / (c.c0 * (1.0 + c.c_s * m.sphericity.array()) * (1.0 + c.c_p * m.planarity.array()) *
                                 (1.0 + c.c_l * m.linearity.array()));
  return out;
}

ScalarField width_map(const ScalarField& corrected_scale, double t) {
  if (!(t > 0.0)) throw DomainError("width_map: t must be positive");
  ScalarField out(corrected_scale.shape());
  out.array() = corrected_scale.array() / t;
  return out;
}

Index ScaleHistogram::total() const {
  Index n = 0;
  for (const auto& b : bins) n += b.count;
  return n;
}

ScaleHistogram scale_histogram(const ScalarField& scale, const MaskField* mask, int bins, double lo, double hi) {
  if (bins < 2) throw DomainError("scale_histogram: need at least two bins");
  if (!(hi > lo)) throw DomainError("scale_histogram: empty range");
  if (mask && !(mask->shape() == scale.shape())) throw ShapeError("scale_histogram: mask shape mismatch");

  ScaleHistogram hist{lo, hi, {}};
  const double width = (hi - lo) / bins;
  for (int b = 0; b < bins; ++b) hist.bins.push_back({lo + (b + 0.5) * width, 0});
  for (Index p = 0; p < scale.size(); ++p) {
    if (mask && (*mask)[p] == 0) continue;
    const auto b = static_cast<int>(std::floor((scale[p] - lo) / width));
    ++hist.bins[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))].count;
  }
  if (hist.total() == 0) throw DomainError("scale_histogram: mask selects no pixels");
  return hist;
}

ScaleHistogram scale_histogram(const ScalarField& scale, const MaskField* mask, int bins, const ScaleGrid& grid) {
  return scale_histogram(scale, mask, bins, grid.min(), grid.max());
}

const char* to_string(RangeAdvice advice) {
  switch (advice) {
    case RangeAdvice::Ok: return "OK";
    case RangeAdvice::ExpandLow: return "EXPAND_LOW";
    case RangeAdvice::ExpandHigh: return "EXPAND_HIGH";
    case RangeAdvice::NoiseWarning: return "NOISE_WARNING";
  }
  return "OK";
}

RangeAdvice range_advice(const ScaleHistogram& hist, const ScaleGrid& /*grid*/, double threshold,
                         double noise_scale) {
  const double total = double(hist.total());
  if (hist.bins.empty() || total == 0.0) throw DomainError("range_advice: empty histogram");
  const double top = double(hist.bins.back().count) / total;
  const double bottom = double(hist.bins.front().count) / total;
  if (top > threshold) return RangeAdvice::ExpandHigh;
  if (bottom > threshold)
    return hist.bins.front().center <= noise_scale ? RangeAdvice::NoiseWarning : RangeAdvice::ExpandLow;
  return RangeAdvice::Ok;
}

namespace {

CenterSample sample_center(const ScaleSpaceResult& r, const MaskField& center) {
  CenterSample s{0, 0, 0, 0, 0};
  Index n = 0;
  const bool three = r.scale.rank() == 3;
  for (Index p = 0; p < center.size(); ++p) {
    if (!center[p]) continue;
    ++n;
    s.scale += r.scale[p];
    if (three) {
      s.linearity += r.measures.linearity[p];
      s.planarity += r.measures.planarity[p];
      s.sphericity += r.measures.sphericity[p];
    } else {
      s.anisotropy += r.measures.anisotropy[p];
    }
  }
  if (n == 0) throw SizeError("phantom has an empty center mask");
  const double inv = 1.0 / double(n);
  return {s.scale * inv, s.anisotropy * inv, s.linearity * inv, s.planarity * inv, s.sphericity * inv};
}

CenterSample analyze_phantom(PhantomKind kind, double width, Index side, int rank, const ScaleGrid& grid,
                             const SweepOptions& options) {
  PhantomSpec spec;
  spec.kind = kind;
  spec.width = width;
  spec.shape = rank == 2 ? Shape{side, side} : Shape{side, side, side};
  const Phantom phantom = generate(spec);
  SweepOptions raw = options;
  raw.correct = false;
  return sample_center(sweep(phantom.field, grid, raw), phantom.parts.front().center);
}

}  // namespace

CorrectionFit3D optimize_correction_3d(double phantom_width, const ScaleGrid& grid, const SweepOptions& options,
                                       const Correction3D& start) {
  const double target = options.params.t * phantom_width;
  if (!(target > grid.min() && target < grid.max() * 2.0))
    throw SizeError("optimize_correction_3d: phantom width not resolvable by the scale grid");
  const Index side = std::max<Index>(32, static_cast<Index>(std::lround(16.0 / 3.0 * phantom_width)));

  CorrectionFit3D fit{start, start, 0, 0, false, {}, target};
  fit.centers[0] = analyze_phantom(PhantomKind::Sphere3D, phantom_width, side, 3, grid, options);
  fit.centers[1] = analyze_phantom(PhantomKind::Cylinder3D, phantom_width, side, 3, grid, options);
  fit.centers[2] = analyze_phantom(PhantomKind::Slab3D, phantom_width, side, 3, grid, options);

  auto objective = [&](const std::array<double, 4>& c) {
    double sum = 0.0;
    for (const auto& s : fit.centers) {
      const double denom = c[0] * (1 + c[1] * s.sphericity) * (1 + c[2] * s.planarity) * (1 + c[3] * s.linearity);
      const double d = (s.scale / denom - target) / target;
      sum += d * d;
    }
    return std::isfinite(sum) ? sum : std::numeric_limits<double>::max();
  };
  fit.objective_start = objective(start.as_array());
  const auto best = nelder_mead<4>(objective, start.as_array());
  fit.objective_end = objective(best);
  fit.improved = fit.objective_end < fit.objective_start;
  if (fit.improved) {
    fit.coefficients = Correction3D::from_array(best);
  } else {
    fit.objective_end = fit.objective_start;
  }
  return fit;
}

CorrectionFit2D optimize_correction_2d(double phantom_width, const ScaleGrid& grid, const SweepOptions& options,
                                       const Correction2D& start) {
  const double target = options.params.t * phantom_width;
  if (!(target > grid.min() && target < grid.max() * 2.0))
    throw SizeError("optimize_correction_2d: phantom width not resolvable by the scale grid");
  const Index side = std::max<Index>(64, static_cast<Index>(std::lround(6.4 * phantom_width)));

  CorrectionFit2D fit{start, start, 0, 0, false, {}, target};
  fit.centers[0] = analyze_phantom(PhantomKind::Disk2D, phantom_width, side, 2, grid, options);
  fit.centers[1] = analyze_phantom(PhantomKind::Line2D, phantom_width, side, 2, grid, options);

  // Parameters: (anis_ratio - 1, 1 - iso_ratio), the two denominator slopes.
  auto objective = [&](const std::array<double, 2>& c) {
    double sum = 0.0;
    for (const auto& s : fit.centers) {
      const double a = s.anisotropy;
      const double d = (s.scale / ((1 + c[0] * a) * (1 - c[1] * (1 - a))) - target) / target;
      sum += d * d;
    }
    return std::isfinite(sum) ? sum : std::numeric_limits<double>::max();
  };
  const std::array<double, 2> x0{start.anis_ratio - 1.0, 1.0 - start.iso_ratio};
  fit.objective_start = objective(x0);
  const auto best = nelder_mead<2>(objective, x0);
  fit.objective_end = objective(best);
  fit.improved = fit.objective_end < fit.objective_start;
  if (fit.improved) {
    fit.coefficients = {1.0 + best[0], 1.0 - best[1]};
  } else {
    fit.objective_end = fit.objective_start;
  }
  return fit;
}

namespace {

SingleScaleResult finish(TensorField tensor) {
  SingleScaleResult r;
  r.eigen = eigendecompose(tensor);
  r.measures = tensor.rank() == 2 ? measures_2d(r.eigen) : measures_3d(r.eigen);
  r.orientation = orientation(r.eigen);
  r.tensor = std::move(tensor);
  return r;
}

}  // namespace

SingleScaleResult single_scale_analyze(const ScalarField& field, double sigma, double rho) {
  if (!(sigma > 0.0) || !(rho > 0.0)) throw DomainError("single_scale_analyze: sigma and rho must be positive");
  return finish(classic_structure_tensor(field, sigma, rho));
}

SingleScaleResult single_scale_analyze_ring(const ScalarField& field, double sigma, const SweepOptions& options) {
  const RingSpec ring(sigma_r_from_scale(sigma, options.k, options.params.t), options.k, field.rank());
  return finish(structure_tensor(field, sigma, options.params.gamma, ring, options.post_smooth_sigma));
}

}  // namespace tensorscale
