#include "tensorscale/synth.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "tensorscale/filters.hpp"

namespace tensorscale {

namespace {

using Point = std::array<double, 3>;  // (z, y, x); z = 0 in 2D
using Predicate = std::function<bool(const Point&)>;

bool is_even_integer(double w) {
  const double r = std::round(w);
  return std::abs(w - r) < 1e-9 && static_cast<long long>(r) % 2 == 0;
}

// Center coordinate near `pos` that keeps a feature of width `w` symmetric
// on the pixel raster.
double centered(double pos, double w) { return std::round(pos) - (is_even_integer(w) ? 0.5 : 0.0); }

template <typename Fn>
void for_each_pixel(const Shape& shape, Fn&& fn) {
  const bool three = shape.rank() == 3;
  const Index nz = three ? shape[0] : 1;
  const Index ny = shape[three ? 1 : 0];
  const Index nx = shape[three ? 2 : 1];
  Index p = 0;
  for (Index z = 0; z < nz; ++z)
    for (Index y = 0; y < ny; ++y)
      for (Index x = 0; x < nx; ++x, ++p) fn(p, Point{double(z), double(y), double(x)});
}

struct Painter {
  Phantom& phantom;
  double foreground;

  void paint(const std::string& name, double width, const Predicate& inside, const Predicate& skeleton,
             const Predicate& center) {
    const Shape& shape = phantom.field.shape();
    PhantomPart part{name, width, MaskField(shape), MaskField(shape)};
    for_each_pixel(shape, [&](Index p, const Point& q) {
      if (!inside(q)) return;
      phantom.field[p] = foreground;
      phantom.feature_mask[p] = 1;
      if (skeleton(q)) {
        part.skeleton[p] = 1;
        phantom.skeleton_mask[p] = 1;
        if (center(q)) part.center[p] = 1;
      }
    });
    phantom.parts.push_back(std::move(part));
  }

  // Vertical bar of width w centered at column cx, rows with |y - cy| < half_length.
  void bar(const std::string& name, double w, double cx, double cy, double half_length) {
    paint(
        name, w, [=](const Point& q) { return std::abs(q[2] - cx) < w / 2 && std::abs(q[1] - cy) < half_length; },
        [=](const Point& q) { return std::abs(q[2] - cx) <= 0.5; },
        [=](const Point& q) { return std::abs(q[1] - cy) <= 0.5; });
  }

  void disk(const std::string& name, double w, double cy, double cx) {
    const double r = w / 2;
    paint(
        name, w, [=](const Point& q) { return std::hypot(q[1] - cy, q[2] - cx) < r; },
        [=](const Point& q) { return std::abs(q[1] - cy) <= 0.5 && std::abs(q[2] - cx) <= 0.5; },
        [](const Point&) { return true; });
  }

  void ellipse(const std::string& name, double w, double aspect, double cy, double cx) {
    const double b = w / 2;
    const double a = aspect * b;
    // Medial axis of an ellipse: the segment between its centers of curvature.
    const double medial = a - b * b / a;
    paint(
        name, w,
        [=](const Point& q) {
          const double dy = (q[1] - cy) / b;
          const double dx = (q[2] - cx) / a;
          return dy * dy + dx * dx < 1.0;
        },
        [=](const Point& q) { return std::abs(q[1] - cy) <= 0.5 && std::abs(q[2] - cx) <= std::max(medial, 0.5); },
        [=](const Point& q) { return std::abs(q[2] - cx) <= 0.5; });
  }
};

Phantom blank(const PhantomSpec& spec) {
  return Phantom{ScalarField(spec.shape, spec.background), MaskField(spec.shape), MaskField(spec.shape), {}};
}

void require_rank(const PhantomSpec& spec, int rank) {
  if (spec.shape.rank() != rank)
    throw ShapeError(std::string("phantom ") + to_string(spec.kind) + " needs a rank-" + std::to_string(rank) +
                     " shape");
}

void require_fits(double extent, double needed, const char* what) {
  if (needed > extent) throw SizeError(std::string("phantom does not fit the grid: ") + what);
}

std::vector<double> band_widths(const PhantomSpec& spec) {
  std::vector<double> widths;
  for (int b = 0; b < spec.bands; ++b) {
    const double f = spec.bands == 1 ? 0.0 : double(b) / double(spec.bands - 1);
    widths.push_back(std::round(spec.width * std::pow(spec.width_max / spec.width, f)));
  }
  return widths;
}

}  // namespace

const char* to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::Rect1D: return "rect1d";
    case PhantomKind::Disk2D: return "disk2d";
    case PhantomKind::Line2D: return "line2d";
    case PhantomKind::Ellipse2D: return "ellipse2d";
    case PhantomKind::IncreasingLines2D: return "lines2d-increasing";
    case PhantomKind::Features2D: return "features2d";
    case PhantomKind::Sphere3D: return "sphere3d";
    case PhantomKind::Cylinder3D: return "cylinder3d";
    case PhantomKind::Slab3D: return "slab3d";
    case PhantomKind::Cylinders3D: return "cylinders3d";
  }
  return "unknown";
}

PhantomKind phantom_kind_from_string(const std::string& name) {
  for (auto kind : {PhantomKind::Rect1D, PhantomKind::Disk2D, PhantomKind::Line2D, PhantomKind::Ellipse2D,
                    PhantomKind::IncreasingLines2D, PhantomKind::Features2D, PhantomKind::Sphere3D,
                    PhantomKind::Cylinder3D, PhantomKind::Slab3D, PhantomKind::Cylinders3D})
    if (name == to_string(kind)) return kind;
  throw std::invalid_argument("unknown phantom kind: " + name);
}

Phantom generate(const PhantomSpec& spec) {
  const double w = spec.width;
  if (!(w >= 2.0)) throw SizeError("phantom width must be >= 2 px");
  double min_extent = double(spec.shape[0]);
  for (int a = 1; a < spec.shape.rank(); ++a) min_extent = std::min(min_extent, double(spec.shape[a]));
  if (!(w < min_extent)) throw SizeError("phantom width must be smaller than every extent");

  Phantom phantom = blank(spec);
  Painter painter{phantom, spec.foreground};
  const Shape& s = spec.shape;

  switch (spec.kind) {
    case PhantomKind::Rect1D: {
      require_rank(spec, 2);
      const double cx = centered(double(s[1]) / 2, w);
      painter.bar("rect", w, cx, 0.0, std::numeric_limits<double>::infinity());
      // The bar is uniform along y; mark the middle row as its center.
      const double cy = std::floor(double(s[0]) / 2);
      auto& part = phantom.parts.back();
      for_each_pixel(s, [&](Index p, const Point& q) {
        part.center[p] = part.skeleton[p] && q[1] == cy ? 1 : 0;
      });
      break;
    }
    case PhantomKind::Line2D: {
      require_rank(spec, 2);
      const double length = std::round(0.75 * double(s[0]));
      painter.bar("line", w, centered(double(s[1]) / 2, w), centered(double(s[0]) / 2, length), length / 2);
      break;
    }
    case PhantomKind::Disk2D:
      require_rank(spec, 2);
      painter.disk("disk", w, centered(double(s[0]) / 2, w), centered(double(s[1]) / 2, w));
      break;
    case PhantomKind::Ellipse2D: {
      require_rank(spec, 2);
      require_fits(double(s[1]), spec.aspect * w, "ellipse major axis");
      painter.ellipse("ellipse", w, spec.aspect, centered(double(s[0]) / 2, w), centered(double(s[1]) / 2, w));
      break;
    }
    case PhantomKind::Features2D: {
      require_rank(spec, 2);
      const double h = double(s[0]);
      const double wd = double(s[1]);
      const double a = spec.aspect * w / 2;
      require_fits(0.25 * wd, w, "disk");
      require_fits(0.35 * wd, a + w, "ellipse");
      require_fits(0.25 * wd, w, "line");
      painter.disk("disk", w, centered(0.25 * h, w), centered(0.25 * wd, w));
      painter.ellipse("ellipse", w, spec.aspect, centered(0.7 * h, w), centered(0.35 * wd, w));
      const double length = std::round(0.7 * h);
      painter.bar("line", w, centered(0.75 * wd, w), centered(0.5 * h, length), length / 2);
      break;
    }
    case PhantomKind::IncreasingLines2D: {
      require_rank(spec, 2);
      if (spec.bands < 1 || spec.bars_per_band < 1) throw SizeError("need at least one band and bar");
      const auto widths = band_widths(spec);
      double cursor = widths.back();
      for (int b = 0; b < spec.bands; ++b) {
        const double bw = widths[static_cast<std::size_t>(b)];
        Phantom band = blank(spec);
        for (int i = 0; i < spec.bars_per_band; ++i) {
          Painter{band, spec.foreground}.bar("bar", bw, cursor + bw / 2 - 0.5, 0.0,
                                             std::numeric_limits<double>::infinity());
          cursor += std::round(bw * (1.0 + spec.gap_ratio));
        }
        require_fits(double(s[1]), cursor - bw * spec.gap_ratio + widths.back(), "line bands");
        // Merge the bars of one band into a single part.
        PhantomPart part{"band" + std::to_string(b), bw, MaskField(s), MaskField(s)};
        for (const auto& bar : band.parts) {
          part.skeleton.array() = part.skeleton.array().max(bar.skeleton.array());
          part.center.array() = part.center.array().max(bar.skeleton.array());
        }
        phantom.field.array() = (band.feature_mask.array() > 0).select(spec.foreground, phantom.field.array());
        phantom.feature_mask.array() = phantom.feature_mask.array().max(band.feature_mask.array());
        phantom.skeleton_mask.array() = phantom.skeleton_mask.array().max(part.skeleton.array());
        phantom.parts.push_back(std::move(part));
      }
      break;
    }
    case PhantomKind::Sphere3D: {
      require_rank(spec, 3);
      const double cz = centered(double(s[0]) / 2, w);
      const double cy = centered(double(s[1]) / 2, w);
      const double cx = centered(double(s[2]) / 2, w);
      painter.paint(
          "sphere", w, [=](const Point& q) { return std::hypot(q[0] - cz, q[1] - cy, q[2] - cx) < w / 2; },
          [=](const Point& q) {
            return std::abs(q[0] - cz) <= 0.5 && std::abs(q[1] - cy) <= 0.5 && std::abs(q[2] - cx) <= 0.5;
          },
          [](const Point&) { return true; });
      break;
    }
    case PhantomKind::Cylinder3D: {
      require_rank(spec, 3);
      const double cz = std::floor(double(s[0]) / 2);
      const double cy = centered(double(s[1]) / 2, w);
      const double cx = centered(double(s[2]) / 2, w);
      painter.paint(
          "cylinder", w, [=](const Point& q) { return std::hypot(q[1] - cy, q[2] - cx) < w / 2; },
          [=](const Point& q) { return std::abs(q[1] - cy) <= 0.5 && std::abs(q[2] - cx) <= 0.5; },
          [=](const Point& q) { return q[0] == cz; });
      break;
    }
    case PhantomKind::Slab3D: {
      require_rank(spec, 3);
      const double cz = std::floor(double(s[0]) / 2);
      const double cy = std::floor(double(s[1]) / 2);
      const double cx = centered(double(s[2]) / 2, w);
      painter.paint(
          "slab", w, [=](const Point& q) { return std::abs(q[2] - cx) < w / 2; },
          [=](const Point& q) { return std::abs(q[2] - cx) <= 0.5; },
          [=](const Point& q) { return q[0] == cz && q[1] == cy; });
      break;
    }
    case PhantomKind::Cylinders3D: {
      require_rank(spec, 3);
      const double small = w;
      const double large = spec.width_max;
      const double nz = double(s[0]);
      const double ny = double(s[1]);
      const double nx = double(s[2]);
      require_fits(0.5 * std::min(nx, nz), small / 2 + large / 2 + 4, "cylinder spacing");
      const Eigen::Vector3d along_z(1, 0, 0);
      const Eigen::Vector3d along_x(0, 0, 1);
      paint_cylinder(phantom, {0, centered(0.25 * ny, small), centered(0.25 * nx, small)}, along_z, small,
                     spec.foreground, "z_small");
      paint_cylinder(phantom, {0, centered(0.25 * ny, large), centered(0.70 * nx, large)}, along_z, large,
                     spec.foreground, "z_large");
      paint_cylinder(phantom, {centered(0.25 * nz, small), centered(0.72 * ny, small), 0}, along_x, small,
                     spec.foreground, "x_small");
      paint_cylinder(phantom, {centered(0.70 * nz, large), centered(0.72 * ny, large), 0}, along_x, large,
                     spec.foreground, "x_large");
      break;
    }
  }
  return phantom;
}

void paint_cylinder(Phantom& phantom, const Eigen::Vector3d& point, const Eigen::Vector3d& direction,
                    double diameter, double foreground, const std::string& name) {
  if (phantom.field.rank() != 3) throw ShapeError("paint_cylinder needs a 3D phantom");
  const Eigen::Vector3d d = direction.normalized();
  const Shape& s = phantom.field.shape();
  // Middle of the axis segment inside the volume, used for the center mask.
  const Eigen::Vector3d mid(double(s[0]) / 2, double(s[1]) / 2, double(s[2]) / 2);
  const double t_mid = (mid - point).dot(d);
  auto radial = [=](const Point& q) {
    const Eigen::Vector3d v = Eigen::Vector3d(q[0], q[1], q[2]) - point;
    return (v - v.dot(d) * d).norm();
  };
  Painter{phantom, foreground}.paint(
      name, diameter, [=](const Point& q) { return radial(q) < diameter / 2; },
      [=](const Point& q) { return radial(q) <= 0.5 * std::sqrt(2.0); },
      [=](const Point& q) { return std::abs((Eigen::Vector3d(q[0], q[1], q[2]) - point).dot(d) - t_mid) <= 0.5; });
}

ScalarField add_noise(const ScalarField& field, NoiseKind kind, double amplitude, std::uint64_t seed,
                      std::optional<int> axis, double smoothing_sigma) {
  if (!(amplitude >= 0.0)) throw DomainError("add_noise: amplitude must be >= 0");
  if (amplitude == 0.0) return field;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ScalarField noise(field.shape());
  for (Index p = 0; p < noise.size(); ++p) noise[p] = normal(rng);

  if (kind == NoiseKind::Anisotropic) {
    const int a = axis.value_or(field.rank() - 1);
    const Kernel1D smooth = gaussian_kernel(smoothing_sigma);
    noise = convolve_axis(noise, smooth, a);
    // Smoothed unit white noise has standard deviation ||taps||_2.
    noise.array() /= std::sqrt(smooth.taps().square().sum());
  }
  ScalarField out = field;
  out.array() += amplitude * noise.array();
  return out;
}

ScalarField downscale2(const ScalarField& field) {
  std::vector<Index> half;
  for (int a = 0; a < field.rank(); ++a) half.push_back(std::max<Index>(1, field.extent(a) / 2));
  const Shape out_shape(half);
  ScalarField out(out_shape);
  const bool three = field.rank() == 3;
  const Index oz = three ? out_shape[0] : 1;
  const Index oy = out_shape[three ? 1 : 0];
  const Index ox = out_shape[three ? 2 : 1];
  const Index dz = three ? 2 : 1;
  const double norm = 1.0 / double(dz * 4);
  for (Index z = 0; z < oz; ++z)
    for (Index y = 0; y < oy; ++y)
      for (Index x = 0; x < ox; ++x) {
        double acc = 0.0;
        for (Index k = 0; k < dz; ++k)
          for (Index j = 0; j < 2; ++j)
            for (Index i = 0; i < 2; ++i)
              acc += three ? field(2 * z + k, 2 * y + j, 2 * x + i) : field(2 * y + j, 2 * x + i);
        if (three)
          out(z, y, x) = acc * norm;
        else
          out(y, x) = acc * norm;
      }
  return out;
}

ScalarField upsample2_nearest(const ScalarField& field, const Shape& target) {
  if (target.rank() != field.rank()) throw ShapeError("upsample2_nearest: rank mismatch");
  ScalarField out(target);
  const int n = field.rank();
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index p = 0; p < out.size(); ++p) {
    Index rem = p;
    Index src = 0;
    for (int a = n - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = rem % target[a];
      rem /= target[a];
    }
    for (int a = 0; a < n; ++a)
      src = src * field.extent(a) + std::min(idx[static_cast<std::size_t>(a)] / 2, field.extent(a) - 1);
    out[p] = field[src];
  }
  return out;
}

}  // namespace tensorscale
