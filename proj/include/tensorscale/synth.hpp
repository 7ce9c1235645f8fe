// Binary test phantoms with known feature widths, noise models and 2x
// resampling.
//
// Rasterization rule: a pixel belongs to a shape iff its center lies strictly
// inside the continuous shape. Shapes of even integer width are centered on a
// pixel corner so the raster stays symmetric; their skeletons are two pixels
// thick.
#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tensorscale/grid.hpp"

namespace tensorscale {

enum class PhantomKind {
  Rect1D,             ///< full-height vertical bar (a 1D rectangle swept along y)
  Disk2D,
  Line2D,             ///< vertical bar with square ends, 3/4 of the image tall
  Ellipse2D,          ///< minor axis = width along y, major axis along x
  IncreasingLines2D,  ///< bands of vertical bars with geometrically growing widths
  Features2D,         ///< disk, line and ellipse of equal width side by side
  Sphere3D,
  Cylinder3D,         ///< along z, diameter = width
  Slab3D,             ///< normal along x, thickness = width
  Cylinders3D,        ///< two widths (width, width_max) times two directions (z, x)
};

const char* to_string(PhantomKind kind);
PhantomKind phantom_kind_from_string(const std::string& name);

struct PhantomSpec {
  PhantomKind kind = PhantomKind::Disk2D;
  double width = 20.0;
  Shape shape{128, 128};
  double foreground = 1.0;
  double background = 0.0;
  std::uint64_t seed = 0;

  // IncreasingLines2D and Cylinders3D.
  double width_max = 24.0;
  int bands = 6;
  int bars_per_band = 2;
  /// Gap between neighbouring bars as a multiple of their width.
  double gap_ratio = 1.5;

  /// Ellipse major/minor axis ratio.
  double aspect = 4.0;
};

/// One feature of a phantom with its medial set and the pixels at its middle.
struct PhantomPart {
  std::string name;
  double width;
  MaskField skeleton;
  MaskField center;
};

struct Phantom {
  ScalarField field;
  MaskField feature_mask;
  MaskField skeleton_mask;
  std::vector<PhantomPart> parts;
};

Phantom generate(const PhantomSpec& spec);

/// Paints a solid cylinder of the given diameter around the line through
/// `point` (z, y, x) along `direction`, recording it as a new part.
void paint_cylinder(Phantom& phantom, const Eigen::Vector3d& point, const Eigen::Vector3d& direction,
                    double diameter, double foreground, const std::string& name);

enum class NoiseKind { Iid, Anisotropic };

/// Adds zero-mean Gaussian noise with standard deviation `amplitude`. The
/// anisotropic variant smooths white noise along `axis` with a 1D Gaussian of
/// `smoothing_sigma` and rescales it back to `amplitude`.
ScalarField add_noise(const ScalarField& field, NoiseKind kind, double amplitude, std::uint64_t seed,
                      std::optional<int> axis = std::nullopt, double smoothing_sigma = 4.0);

/// 2x block-mean downsampling; an odd trailing sample along any axis is dropped.
ScalarField downscale2(const ScalarField& field);

/// Nearest-neighbour 2x upsampling onto `target` (extra samples copy the edge).
ScalarField upsample2_nearest(const ScalarField& field, const Shape& target);

}  // namespace tensorscale
