// Dense scale selection over a sweep of derivative scales, scale-map
// correction and the helpers built on top of it.
#pragma once

#include <array>
#include <optional>
#include <vector>

#include "tensorscale/scalecalc.hpp"
#include "tensorscale/tensor.hpp"

namespace tensorscale {

enum class Spacing { Linear, Geometric };

/// Strictly increasing list of derivative scales in pixels.
class ScaleGrid {
 public:
  ScaleGrid(std::vector<double> sigmas, Spacing spacing);

  /// sigma_min, sigma_min + step, ... up to sigma_max (inclusive within 1e-9).
  static ScaleGrid linear(double sigma_min, double sigma_max, double step = 1.0);
  /// sigma_min * ratio^i up to sigma_max; default ratio 2^(1/4).
  static ScaleGrid geometric(double sigma_min, double sigma_max, double ratio = 1.189207115002721);

  const std::vector<double>& sigmas() const { return sigmas_; }
  Spacing spacing() const { return spacing_; }
  std::size_t size() const { return sigmas_.size(); }
  double min() const { return sigmas_.front(); }
  double max() const { return sigmas_.back(); }

 private:
  std::vector<double> sigmas_;
  Spacing spacing_;
};

/// Denominator factors for the 2D correction
/// S / ((1 + (anis_ratio - 1) A) (1 - (1 - iso_ratio)(1 - A))).
struct Correction2D {
  double anis_ratio = 1.0675;
  double iso_ratio = 2.0 / 3.0;

  /// iso_ratio = gamma / (3 - gamma); anis_ratio as given.
  static Correction2D for_gamma(double gamma, double anis_ratio);
};

/// Coefficients of S / (c0 (1 + c_s m_s)(1 + c_p m_p)(1 + c_l m_l)).
struct Correction3D {
  double c0 = 0.53;
  double c_s = 0.0158;
  double c_p = 1.0;
  double c_l = 0.327;

  std::array<double, 4> as_array() const { return {c0, c_s, c_p, c_l}; }
  static Correction3D from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }
};

struct SweepOptions {
  GammaParams params{};
  double k = kDefaultRingRatio;
  std::optional<double> post_smooth_sigma;
  bool correct = true;
  /// Anisotropic ring ratio. Unset: 1.0675 for gamma 1.2 and k 0.999,
  /// otherwise measured with calibrate_anis_ratio.
  std::optional<double> anis_ratio;
  Correction3D correction_3d{};
};

struct ScaleSpaceResult {
  ScalarField scale;            ///< selected sigma per pixel
  ScalarField corrected_scale;  ///< equals `scale` when correction is off
  ScalarField width;            ///< corrected_scale / t
  ScalarField best_trace;
  TensorField tensor;           ///< winning tensor per pixel
  EigenField eigen;
  MeasureField measures;
  std::vector<ScalarField> orientation;
};

/// Runs the ring-integrated structure tensor at every grid scale and keeps,
/// per pixel, the scale with the largest trace (ties keep the smaller scale).
ScaleSpaceResult sweep(const ScalarField& field, const ScaleGrid& grid, const SweepOptions& options = {});

ScalarField correct_scale_2d(const ScalarField& scale, const ScalarField& anisotropy,
                             const Correction2D& correction = {});
ScalarField correct_scale_3d(const ScalarField& scale, const MeasureField& measures,
                             const Correction3D& correction = {});
ScalarField width_map(const ScalarField& corrected_scale, double t);

struct HistogramBin {
  double center;
  Index count;
};

struct ScaleHistogram {
  double lo;
  double hi;
  std::vector<HistogramBin> bins;

  Index total() const;
};

/// Histogram of `scale` over pixels where `mask` is nonzero, with `bins`
/// equal bins spanning [lo, hi]. Values outside are clamped into the end bins.
ScaleHistogram scale_histogram(const ScalarField& scale, const MaskField* mask, int bins, double lo,
                               double hi);
ScaleHistogram scale_histogram(const ScalarField& scale, const MaskField* mask, int bins,
                               const ScaleGrid& grid);

enum class RangeAdvice { Ok, ExpandLow, ExpandHigh, NoiseWarning };

const char* to_string(RangeAdvice advice);

/// Flags a dominant peak at either end of the scale range. `threshold` is the
/// mass fraction that counts as dominant; peaks at or below `noise_scale`
/// pixels suggest noise rather than small features.
RangeAdvice range_advice(const ScaleHistogram& hist, const ScaleGrid& grid, double threshold = 0.15,
                         double noise_scale = 3.0);

/// Values sampled at the skeleton of one phantom, used by the correction fits.
struct CenterSample {
  double scale;
  double anisotropy;
  double linearity;
  double planarity;
  double sphericity;
};

struct CorrectionFit3D {
  Correction3D start;
  Correction3D coefficients;
  double objective_start;
  double objective_end;
  bool improved;
  /// Sphere, cylinder, slab.
  std::array<CenterSample, 3> centers;
  double target;
};

struct CorrectionFit2D {
  Correction2D start;
  Correction2D coefficients;
  double objective_start;
  double objective_end;
  bool improved;
  /// Disk, line.
  std::array<CenterSample, 2> centers;
  double target;
};

/// Fits the 3D correction to sphere, cylinder and slab phantoms of equal
/// width so that their corrected center scales all equal t * width.
CorrectionFit3D optimize_correction_3d(double phantom_width, const ScaleGrid& grid,
                                       const SweepOptions& options = {},
                                       const Correction3D& start = {});

/// Same fit for the 2D correction on a disk and a line.
CorrectionFit2D optimize_correction_2d(double phantom_width, const ScaleGrid& grid,
                                       const SweepOptions& options = {},
                                       const Correction2D& start = {});

/// Derivative-free Nelder-Mead minimization, used by the correction fits.
template <std::size_t N, typename Objective>
std::array<double, N> nelder_mead(Objective&& objective, std::array<double, N> start,
                                  double initial_step = 0.05, int max_iterations = 2000);

struct SingleScaleResult {
  TensorField tensor;
  EigenField eigen;
  MeasureField measures;
  std::vector<ScalarField> orientation;
};

/// Classic single-scale analysis with Gaussian integration.
SingleScaleResult single_scale_analyze(const ScalarField& field, double sigma, double rho);

/// Single-scale analysis with the ring in place of Gaussian integration.
SingleScaleResult single_scale_analyze_ring(const ScalarField& field, double sigma,
                                            const SweepOptions& options = {});

}  // namespace tensorscale

#include "tensorscale/detail/nelder_mead.hpp"
