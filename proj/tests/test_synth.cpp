#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tensorscale/errors.hpp"
#include "tensorscale/synth.hpp"

namespace tensorscale {
namespace {

Index count(const MaskField& m) {
  Index n = 0;
  for (Index p = 0; p < m.size(); ++p) n += m[p] != 0;
  return n;
}

Phantom make(PhantomKind kind, double width, Shape shape) {
  PhantomSpec spec;
  spec.kind = kind;
  spec.width = width;
  spec.shape = shape;
  return generate(spec);
}

double lag_correlation(const ScalarField& f, int axis) {
  double num = 0.0, den = 0.0;
  for (Index y = 0; y + 1 < f.shape()[0]; ++y)
    for (Index x = 0; x + 1 < f.shape()[1]; ++x) {
      const double a = f(y, x);
      num += a * (axis == 0 ? f(y + 1, x) : f(y, x + 1));
      den += a * a;
    }
  return num / den;
}

TEST(Phantom, KindNamesRoundTrip) {
  for (PhantomKind k : {PhantomKind::Rect1D, PhantomKind::Disk2D, PhantomKind::Line2D, PhantomKind::Ellipse2D,
                        PhantomKind::IncreasingLines2D, PhantomKind::Features2D, PhantomKind::Sphere3D,
                        PhantomKind::Cylinder3D, PhantomKind::Slab3D, PhantomKind::Cylinders3D})
    EXPECT_EQ(phantom_kind_from_string(to_string(k)), k);
  EXPECT_THROW(phantom_kind_from_string("torus"), std::invalid_argument);
}

TEST(Phantom, DiskArea) {
  const Phantom ph = make(PhantomKind::Disk2D, 20, Shape{64, 64});
  EXPECT_NEAR(double(count(ph.feature_mask)), 100.0 * std::numbers::pi, 20.0);
  ASSERT_EQ(ph.parts.size(), 1u);
  EXPECT_EQ(ph.parts[0].width, 20.0);
  EXPECT_GE(count(ph.parts[0].center), 1);
}

TEST(Phantom, LineSkeletonInMiddleColumns) {
  const Phantom ph = make(PhantomKind::Line2D, 20, Shape{64, 64});
  // Width 20 centered on the corner between columns 31 and 32.
  for (Index y = 0; y < 64; ++y)
    for (Index x = 0; x < 64; ++x)
      if (ph.skeleton_mask(y, x)) EXPECT_TRUE(x == 31 || x == 32) << x;
  for (Index x = 0; x < 64; ++x) EXPECT_EQ(ph.feature_mask(32, x) != 0, x >= 22 && x < 42) << x;
  EXPECT_GT(count(ph.skeleton_mask), 40);
}

TEST(Phantom, SlabThickness) {
  const Phantom ph = make(PhantomKind::Slab3D, 7, Shape{24, 24, 24});
  Index n = 0;
  for (Index x = 0; x < 24; ++x) n += ph.feature_mask(12, 12, x) != 0;
  EXPECT_EQ(n, 7);
  for (Index p = 0; p < ph.skeleton_mask.size(); ++p)
    if (ph.skeleton_mask[p]) EXPECT_EQ(p % 24, 12);
}

TEST(Phantom, CylinderCrossSection) {
  const Phantom ph = make(PhantomKind::Cylinder3D, 10, Shape{20, 32, 32});
  Index slice = 0;
  for (Index y = 0; y < 32; ++y)
    for (Index x = 0; x < 32; ++x) slice += ph.feature_mask(5, y, x) != 0;
  EXPECT_NEAR(double(slice), 25.0 * std::numbers::pi, 8.0);
  for (Index z = 1; z < 20; ++z) EXPECT_EQ(ph.feature_mask(z, 16, 16), ph.feature_mask(0, 16, 16));
}

TEST(Phantom, ForegroundAndBackground) {
  PhantomSpec spec;
  spec.kind = PhantomKind::Sphere3D;
  spec.width = 6;
  spec.shape = Shape{16, 16, 16};
  spec.foreground = 0.25;
  spec.background = 2.0;
  const Phantom ph = generate(spec);
  for (Index p = 0; p < ph.field.size(); ++p) EXPECT_EQ(ph.field[p], ph.feature_mask[p] ? 0.25 : 2.0);
}

TEST(Phantom, IncreasingLinesBands) {
  PhantomSpec spec;
  spec.kind = PhantomKind::IncreasingLines2D;
  spec.width = 4;
  spec.width_max = 24;
  spec.shape = Shape{128, 512};
  const Phantom ph = generate(spec);
  ASSERT_EQ(ph.parts.size(), 6u);
  EXPECT_NEAR(ph.parts.front().width, 4.0, 1e-12);
  EXPECT_NEAR(ph.parts.back().width, 24.0, 1e-12);
  for (std::size_t i = 1; i < ph.parts.size(); ++i) EXPECT_GT(ph.parts[i].width, ph.parts[i - 1].width);
}

TEST(Phantom, RejectsOversizedFeature) {
  EXPECT_THROW(make(PhantomKind::Disk2D, 40, Shape{32, 64}), SizeError);
  EXPECT_THROW(make(PhantomKind::Sphere3D, 8, Shape{16, 16}), ShapeError);
}

TEST(Noise, ZeroAmplitudeIsIdentity) {
  const Phantom ph = make(PhantomKind::Disk2D, 10, Shape{32, 32});
  const ScalarField f = add_noise(ph.field, NoiseKind::Iid, 0.0, 3);
  EXPECT_TRUE((f.array() == ph.field.array()).all());
}

TEST(Noise, SeedReproducibleAndAmplitude) {
  const ScalarField zero(Shape{128, 128});
  const ScalarField a = add_noise(zero, NoiseKind::Iid, 0.3, 5);
  const ScalarField b = add_noise(zero, NoiseKind::Iid, 0.3, 5);
  const ScalarField c = add_noise(zero, NoiseKind::Iid, 0.3, 6);
  EXPECT_TRUE((a.array() == b.array()).all());
  EXPECT_FALSE((a.array() == c.array()).all());
  const double sd = std::sqrt(a.array().square().mean() - std::pow(a.array().mean(), 2));
  EXPECT_NEAR(sd, 0.3, 0.01);
  EXPECT_NEAR(a.array().mean(), 0.0, 0.01);
}

TEST(Noise, AnisotropicIsCorrelatedAlongAxis) {
  const ScalarField zero(Shape{128, 128});
  const ScalarField n = add_noise(zero, NoiseKind::Anisotropic, 0.2, 7, 1, 4.0);
  const double along = lag_correlation(n, 1);
  const double across = lag_correlation(n, 0);
  EXPECT_GT(along, 2.0 * std::abs(across));
  EXPECT_GT(along, 0.8);
  const double sd = std::sqrt(n.array().square().mean());
  EXPECT_NEAR(sd, 0.2, 0.03);
  EXPECT_THROW(add_noise(zero, NoiseKind::Anisotropic, 0.2, 7, 2), ShapeError);
}

TEST(Resample, DownscaleConstantAndCheckerboard) {
  const ScalarField c = downscale2(ScalarField(Shape{9, 10, 4}, 3.0));
  EXPECT_EQ(c.shape(), (Shape{4, 5, 2}));
  EXPECT_TRUE((c.array() == 3.0).all());
  ScalarField board(Shape{8, 8});
  for (Index y = 0; y < 8; ++y)
    for (Index x = 0; x < 8; ++x) board(y, x) = double((x + y) % 2);
  EXPECT_TRUE((downscale2(board).array() == 0.5).all());
}

TEST(Resample, DownscaleBlockMean) {
  ScalarField f(Shape{2, 4});
  for (Index p = 0; p < 8; ++p) f[p] = double(p);
  const ScalarField d = downscale2(f);
  EXPECT_DOUBLE_EQ(d(0, 0), (0 + 1 + 4 + 5) / 4.0);
  EXPECT_DOUBLE_EQ(d(0, 1), (2 + 3 + 6 + 7) / 4.0);
}

TEST(Resample, UpsampleNearest) {
  ScalarField f(Shape{2, 3});
  for (Index p = 0; p < 6; ++p) f[p] = double(p);
  const ScalarField u = upsample2_nearest(f, Shape{5, 7});
  EXPECT_EQ(u(0, 0), 0.0);
  EXPECT_EQ(u(1, 1), 0.0);
  EXPECT_EQ(u(2, 5), 5.0);
  EXPECT_EQ(u(4, 6), 5.0);  // beyond 2x copies the edge
  EXPECT_TRUE((upsample2_nearest(downscale2(ScalarField(Shape{6, 6}, 1.0)), Shape{6, 6}).array() == 1.0).all());
}

// Properties.

TEST(PhantomProperty, SkeletonInsideFeature) {
  for (PhantomKind k : {PhantomKind::Disk2D, PhantomKind::Line2D, PhantomKind::Ellipse2D, PhantomKind::Features2D,
                        PhantomKind::Rect1D})
    for (double w : {5.0, 8.0}) {
      const Phantom ph = make(k, w, Shape{64, 192});
      for (Index p = 0; p < ph.skeleton_mask.size(); ++p) {
        if (ph.skeleton_mask[p]) EXPECT_TRUE(ph.feature_mask[p]) << to_string(k);
      }
      for (const auto& part : ph.parts)
        for (Index p = 0; p < part.center.size(); ++p)
          if (part.center[p]) EXPECT_TRUE(part.skeleton[p]) << to_string(k) << " " << part.name;
    }
  for (PhantomKind k : {PhantomKind::Sphere3D, PhantomKind::Cylinder3D, PhantomKind::Slab3D}) {
    const Phantom ph = make(k, 6, Shape{20, 20, 20});
    for (Index p = 0; p < ph.skeleton_mask.size(); ++p)
      if (ph.skeleton_mask[p]) EXPECT_TRUE(ph.feature_mask[p]) << to_string(k);
  }
}

TEST(PhantomProperty, Deterministic) {
  PhantomSpec spec;
  spec.kind = PhantomKind::Cylinders3D;
  spec.width = 4;
  spec.width_max = 8;
  spec.shape = Shape{32, 32, 32};
  const Phantom a = generate(spec);
  const Phantom b = generate(spec);
  EXPECT_TRUE((a.field.array() == b.field.array()).all());
  EXPECT_EQ(a.parts.size(), b.parts.size());
}

}  // namespace
}  // namespace tensorscale
