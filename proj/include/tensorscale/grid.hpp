// Dense 2D/3D sample grids and the separable convolution engine.
//
// Fields are stored row-major with the last axis fastest. A 2D field has
// axes (y, x); a 3D field has axes (z, y, x). All filtering arithmetic is
// done in double precision.
#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "tensorscale/errors.hpp"

namespace tensorscale {

using Index = Eigen::Index;

/// Per-axis extents of a 2D or 3D grid.
class Shape {
 public:
  Shape() = default;
  Shape(std::initializer_list<Index> extents) : extents_(extents) { validate(); }
  explicit Shape(std::vector<Index> extents) : extents_(std::move(extents)) { validate(); }

  int rank() const { return static_cast<int>(extents_.size()); }
  Index operator[](int axis) const { return extents_[static_cast<std::size_t>(axis)]; }
  Index size() const {
    Index n = 1;
    for (Index e : extents_) n *= e;
    return n;
  }
  /// Distance in samples between neighbours along `axis`.
  Index stride(int axis) const {
    Index s = 1;
    for (int a = rank() - 1; a > axis; --a) s *= (*this)[a];
    return s;
  }
  const std::vector<Index>& extents() const { return extents_; }

  bool operator==(const Shape&) const = default;

 private:
  void validate() const {
    if (extents_.size() < 2 || extents_.size() > 3)
      throw ShapeError("grid rank must be 2 or 3");
    for (Index e : extents_)
      if (e < 1) throw ShapeError("grid extents must be >= 1");
  }

  std::vector<Index> extents_;
};

/// Dense field of samples over a Shape. `Field<double>` carries image data and
/// derived maps; `Field<std::uint8_t>` carries masks.
template <typename Scalar>
class Field {
 public:
  using ArrayType = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Field() = default;
  explicit Field(Shape shape, Scalar fill = Scalar(0))
      : shape_(std::move(shape)), data_(ArrayType::Constant(shape_.size(), fill)) {}
  Field(Shape shape, ArrayType data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_.size()) throw ShapeError("sample count does not match shape");
  }

  const Shape& shape() const { return shape_; }
  int rank() const { return shape_.rank(); }
  Index extent(int axis) const { return shape_[axis]; }
  Index size() const { return data_.size(); }

  ArrayType& array() { return data_; }
  const ArrayType& array() const { return data_; }
  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }

  Scalar& operator[](Index i) { return data_[i]; }
  Scalar operator[](Index i) const { return data_[i]; }

  Index offset(Index y, Index x) const { return y * shape_[1] + x; }
  Index offset(Index z, Index y, Index x) const { return (z * shape_[1] + y) * shape_[2] + x; }

  Scalar& operator()(Index y, Index x) { return data_[offset(y, x)]; }
  Scalar operator()(Index y, Index x) const { return data_[offset(y, x)]; }
  Scalar& operator()(Index z, Index y, Index x) { return data_[offset(z, y, x)]; }
  Scalar operator()(Index z, Index y, Index x) const { return data_[offset(z, y, x)]; }

  bool all_finite() const {
    if constexpr (std::is_floating_point_v<Scalar>) return data_.isFinite().all();
    return true;
  }

 private:
  Shape shape_;
  ArrayType data_;
};

using ScalarField = Field<double>;
using MaskField = Field<std::uint8_t>;

/// Odd-length 1D filter taps with the center at index `radius()`.
///
/// Kernels are applied by correlation: out[i] = sum_j taps[r + j] * in[i + j].
class Kernel1D {
 public:
  Kernel1D() = default;
  explicit Kernel1D(Eigen::ArrayXd taps);

  Index radius() const { return (taps_.size() - 1) / 2; }
  Index size() const { return taps_.size(); }
  const Eigen::ArrayXd& taps() const { return taps_; }
  double operator[](Index i) const { return taps_[i]; }
  /// Tap at signed offset j in [-radius, radius].
  double at(Index j) const { return taps_[radius() + j]; }
  double sum() const { return taps_.sum(); }

 private:
  Eigen::ArrayXd taps_;
};

enum class BoundaryRule {
  /// Reflect about the edge sample without repeating it: index -1 reads 1.
  Mirror,
};

/// Maps an out-of-range index into [0, n) by mirror reflection. Offsets far
/// beyond the edge keep reflecting with period 2(n - 1).
Index mirror_index(Index i, Index n);

/// Correlates every line along `axis` with `kernel`.
ScalarField convolve_axis(const ScalarField& field, const Kernel1D& kernel, int axis,
                          BoundaryRule boundary = BoundaryRule::Mirror);

/// Applies one kernel per axis, axis 0 first.
ScalarField convolve_separable(const ScalarField& field, std::span<const Kernel1D> kernels,
                               BoundaryRule boundary = BoundaryRule::Mirror);

/// Number of worker threads used for per-line work. Results do not depend on it.
void set_thread_count(int threads);
int thread_count();

}  // namespace tensorscale
