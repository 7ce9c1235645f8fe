// First-order structure tensor at a single scale, its eigendecomposition and
// the shape/orientation measures derived from it.
//
// Vector-valued quantities (gradients, tensor channels, eigenvectors) are
// indexed in storage axis order: (y, x) in 2D and (z, y, x) in 3D.
#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "tensorscale/filters.hpp"
#include "tensorscale/grid.hpp"

namespace tensorscale {

/// Per-pixel symmetric matrix stored as its upper triangle, row by row:
/// 2D (00, 01, 11); 3D (00, 01, 02, 11, 12, 22).
struct TensorField {
  Shape shape;
  std::vector<ScalarField> channels;

  int rank() const { return shape.rank(); }
  static int channel_count(int rank) { return rank * (rank + 1) / 2; }
  static int channel_index(int i, int j, int rank);

  ScalarField trace() const;

  template <int N>
  Eigen::Matrix<double, N, N> matrix(Index p) const {
    Eigen::Matrix<double, N, N> m;
    int c = 0;
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) {
        m(i, j) = m(j, i) = channels[static_cast<std::size_t>(c)][p];
        ++c;
      }
    return m;
  }
};

/// Sorted eigenvalues (lambdas[0] smallest) and the unit eigenvector of the
/// smallest eigenvalue, the direction of least intensity change.
///
/// The eigenvector sign is canonical. 2D: the y component is positive, or
/// the vector is (0, -1) so the angle from the x axis lies in (0, pi].
/// 3D: the z component is positive; when it is zero, the first nonzero of
/// (x, y) is positive.
struct EigenField {
  Shape shape;
  std::vector<ScalarField> lambdas;
  std::vector<ScalarField> principal;
};

/// Shape measures, each in [0, 1]. 2D fills `anisotropy`; 3D fills `fa` and
/// the linearity/planarity/sphericity partition.
struct MeasureField {
  ScalarField anisotropy;
  ScalarField fa;
  ScalarField linearity;
  ScalarField planarity;
  ScalarField sphericity;
};

/// Gamma-normalized Gaussian gradient, one component per axis.
std::vector<ScalarField> gradient(const ScalarField& field, double sigma, double gamma);

/// Ring-integrated tensor built from gradient(field, sigma, gamma).
TensorField structure_tensor(const ScalarField& field, double sigma, double gamma,
                             const RingSpec& ring,
                             std::optional<double> post_smooth_sigma = std::nullopt);

/// Classic tensor: Gaussian(rho)-smoothed products of Gaussian(sigma)
/// gradients with gamma = 1. rho = 0 skips integration.
TensorField classic_structure_tensor(const ScalarField& field, double sigma, double rho);

/// Outer products of gradient components, no integration.
TensorField outer_products(const std::vector<ScalarField>& gradient);

EigenField eigendecompose(const TensorField& tensors);

/// Closed-form 2x2 symmetric eigensolver. Returns ascending eigenvalues and
/// the canonical unit eigenvector of the smaller one.
template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, 2, 1>, Eigen::Matrix<Scalar, 2, 1>> eigen_sym2(
    const Eigen::Matrix<Scalar, 2, 2>& m);

/// 3x3 symmetric eigensolver: closed form, with iterative refinement when
/// eigenvalues are nearly repeated.
template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, 3, 1>, Eigen::Matrix<Scalar, 3, 1>> eigen_sym3(
    const Eigen::Matrix<Scalar, 3, 3>& m);

/// Applies the canonical sign convention in place (axis-order vector).
template <typename Scalar, int N>
void canonicalize(Eigen::Matrix<Scalar, N, 1>& v);

/// Degeneracy threshold for measures: 1e-12 of the largest trace.
double degeneracy_threshold(const EigenField& eigen);

MeasureField measures_2d(const EigenField& eigen);
MeasureField measures_3d(const EigenField& eigen);

/// 2D: one field, angle in (0, pi] from the x axis towards +y.
/// 3D: three fields, the canonical unit vector as (x, y, z).
std::vector<ScalarField> orientation(const EigenField& eigen);

}  // namespace tensorscale
