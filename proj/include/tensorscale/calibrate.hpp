// Empirical measurement of the ring/line alignment ratio.
#pragma once

#include <span>
#include <vector>

namespace tensorscale {

struct AnisRatioCalibration {
  std::vector<double> widths;
  /// Detected width / true width at the centerline of each line.
  std::vector<double> ratios;
  double mean;
  double stddev;
};

/// For each width, sweeps a binary straight line over a fine scale grid,
/// reads the selected scale at the centerline (two middle columns averaged
/// for even widths) and converts it to a width via t. Widths must be >= 4 px
/// and at least three must be given.
AnisRatioCalibration calibrate_anis_ratio(std::span<const double> widths, double gamma, double k);

/// 1.0675 for the default gamma/k pair, otherwise a cached calibration over
/// widths {10, 20, 30, 40}.
double anis_ratio_for(double gamma, double k);

}  // namespace tensorscale
