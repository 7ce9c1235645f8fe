#include "tensorscale/tensor.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

#include "parallel.hpp"

namespace tensorscale {

namespace {

template <typename Scalar>
constexpr Scalar zero_tolerance() {
  return Scalar(1e3) * std::numeric_limits<Scalar>::epsilon();
}

TensorField integrate(const std::vector<ScalarField>& grad, auto&& integrator) {
  TensorField out{grad.front().shape(), {}};
  const int n = static_cast<int>(grad.size());
  out.channels.reserve(static_cast<std::size_t>(TensorField::channel_count(n)));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      ScalarField product(out.shape);
      product.array() = grad[static_cast<std::size_t>(i)].array() * grad[static_cast<std::size_t>(j)].array();
      out.channels.push_back(integrator(product));
    }
  return out;
}

}  // namespace

int TensorField::channel_index(int i, int j, int rank) {
  if (i > j) std::swap(i, j);
  // Row i of the upper triangle starts after rows 0..i-1.
  return i * rank - i * (i - 1) / 2 + (j - i);
}

ScalarField TensorField::trace() const {
  ScalarField out(shape);
  for (int i = 0; i < rank(); ++i)
    out.array() += channels[static_cast<std::size_t>(channel_index(i, i, rank()))].array();
  return out;
}

std::vector<ScalarField> gradient(const ScalarField& field, double sigma, double gamma) {
  const Kernel1D smooth = gaussian_kernel(sigma);
  const Kernel1D derivative = gaussian_derivative_kernel(sigma, gamma);
  std::vector<ScalarField> out;
  out.reserve(static_cast<std::size_t>(field.rank()));
  for (int axis = 0; axis < field.rank(); ++axis) {
    std::vector<Kernel1D> kernels(static_cast<std::size_t>(field.rank()), smooth);
    kernels[static_cast<std::size_t>(axis)] = derivative;
    out.push_back(convolve_separable(field, kernels));
  }
  return out;
}

TensorField outer_products(const std::vector<ScalarField>& grad) {
  return integrate(grad, [](ScalarField product) { return product; });
}

TensorField structure_tensor(const ScalarField& field, double sigma, double gamma,
                             const RingSpec& ring, std::optional<double> post_smooth_sigma) {
  const auto grad = gradient(field, sigma, gamma);
  std::vector<Kernel1D> smooth;
  if (post_smooth_sigma && *post_smooth_sigma > 0.0)
    smooth.assign(static_cast<std::size_t>(field.rank()), gaussian_kernel(*post_smooth_sigma));
  return integrate(grad, [&](const ScalarField& product) {
    ScalarField ringed = apply_ring(product, ring);
    return smooth.empty() ? ringed : convolve_separable(ringed, smooth);
  });
}

TensorField classic_structure_tensor(const ScalarField& field, double sigma, double rho) {
  if (!(rho >= 0.0)) throw DomainError("classic_structure_tensor: rho must be >= 0");
  const auto grad = gradient(field, sigma, 1.0);
  if (rho == 0.0) return outer_products(grad);
  const std::vector<Kernel1D> smooth(static_cast<std::size_t>(field.rank()), gaussian_kernel(rho));
  return integrate(grad, [&](const ScalarField& product) { return convolve_separable(product, smooth); });
}

template <typename Scalar, int N>
void canonicalize(Eigen::Matrix<Scalar, N, 1>& v) {
  const Scalar tol = zero_tolerance<Scalar>();
  if constexpr (N == 2) {
    // (y, x): y > 0, or the vector is (0, -1).
    if (v[0] < -tol || (std::abs(v[0]) <= tol && v[1] > 0)) v = -v;
  } else {
    // (z, y, x): z > 0, else x > 0, else y > 0.
    Scalar key = v[0];
    if (std::abs(key) <= tol) key = std::abs(v[2]) > tol ? v[2] : v[1];
    if (key < 0) v = -v;
  }
}

template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, 2, 1>, Eigen::Matrix<Scalar, 2, 1>> eigen_sym2(
    const Eigen::Matrix<Scalar, 2, 2>& m) {
  using Vec = Eigen::Matrix<Scalar, 2, 1>;
  const Scalar a = m(0, 0);
  const Scalar b = m(0, 1);
  const Scalar c = m(1, 1);
  const Scalar mean = (a + c) / 2;
  const Scalar radius = std::hypot((a - c) / 2, b);
  Vec lambdas(mean - radius, mean + radius);

  Vec v;
  const Scalar scale = std::abs(a) + std::abs(b) + std::abs(c);
  if (radius <= zero_tolerance<Scalar>() * scale || scale == 0) {
    v = Vec(0, 1);  // isotropic: x axis by convention
  } else {
    // Null vector of (m - lambda1 I), taken from the better-conditioned row.
    const Vec from_row0(-b, a - lambdas[0]);
    const Vec from_row1(c - lambdas[0], -b);
    v = from_row0.squaredNorm() >= from_row1.squaredNorm() ? from_row0 : from_row1;
    v.normalize();
  }
  canonicalize<Scalar, 2>(v);
  return {lambdas, v};
}

template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, 3, 1>, Eigen::Matrix<Scalar, 3, 1>> eigen_sym3(
    const Eigen::Matrix<Scalar, 3, 3>& m) {
  using Mat = Eigen::Matrix<Scalar, 3, 3>;
  using Vec = Eigen::Matrix<Scalar, 3, 1>;
  const Scalar scale = m.cwiseAbs().maxCoeff();
  if (scale == 0) return {Vec::Zero(), Vec(0, 0, 1)};

  Eigen::SelfAdjointEigenSolver<Mat> solver;
  solver.computeDirect(m);
  Vec lambdas = solver.eigenvalues();
  const Scalar gap = std::min(lambdas[1] - lambdas[0], lambdas[2] - lambdas[1]);
  const Scalar trace = std::abs(m.trace());
  // The closed form loses about sqrt(eps) on clustered eigenvalues.
  if (gap < Scalar(1e-4) * std::max(trace, scale)) {
    solver.compute(m);
    lambdas = solver.eigenvalues();
  }
  Vec v = solver.eigenvectors().col(0).normalized();
  if (lambdas[2] - lambdas[0] <= zero_tolerance<Scalar>() * scale) v = Vec(0, 0, 1);
  canonicalize<Scalar, 3>(v);
  return {lambdas, v};
}

template void canonicalize<double, 2>(Eigen::Vector2d&);
template void canonicalize<double, 3>(Eigen::Vector3d&);
template void canonicalize<float, 2>(Eigen::Vector2f&);
template void canonicalize<float, 3>(Eigen::Vector3f&);
template std::pair<Eigen::Vector2d, Eigen::Vector2d> eigen_sym2(const Eigen::Matrix2d&);
template std::pair<Eigen::Vector2f, Eigen::Vector2f> eigen_sym2(const Eigen::Matrix2f&);
template std::pair<Eigen::Vector3d, Eigen::Vector3d> eigen_sym3(const Eigen::Matrix3d&);
template std::pair<Eigen::Vector3f, Eigen::Vector3f> eigen_sym3(const Eigen::Matrix3f&);

EigenField eigendecompose(const TensorField& tensors) {
  const int n = tensors.rank();
  for (const auto& c : tensors.channels)
    if (!c.all_finite()) throw NumericalError("eigendecompose: non-finite tensor channel");

  EigenField out{tensors.shape, {}, {}};
  out.lambdas.assign(static_cast<std::size_t>(n), ScalarField(tensors.shape));
  out.principal.assign(static_cast<std::size_t>(n), ScalarField(tensors.shape));
  const Index pixels = tensors.shape.size();

  auto store = [&](Index p, const auto& lambdas, const auto& v) {
    for (int i = 0; i < n; ++i) {
      out.lambdas[static_cast<std::size_t>(i)][p] = lambdas[i];
      out.principal[static_cast<std::size_t>(i)][p] = v[i];
    }
  };
  if (n == 2) {
    parallel_for(pixels, [&](Index p) {
      const auto [lambdas, v] = eigen_sym2<double>(tensors.matrix<2>(p));
      store(p, lambdas, v);
    });
  } else {
    parallel_for(pixels, [&](Index p) {
      const auto [lambdas, v] = eigen_sym3<double>(tensors.matrix<3>(p));
      store(p, lambdas, v);
    });
  }
  return out;
}

double degeneracy_threshold(const EigenField& eigen) {
  Eigen::ArrayXd trace = Eigen::ArrayXd::Zero(eigen.shape.size());
  for (const auto& l : eigen.lambdas) trace += l.array();
  return 1e-12 * std::max(trace.maxCoeff(), 0.0);
}

MeasureField measures_2d(const EigenField& eigen) {
  if (eigen.shape.rank() != 2) throw ShapeError("measures_2d: need a 2D eigen field");
  const double eps = degeneracy_threshold(eigen);
  const auto& l1 = eigen.lambdas[0].array();
  const auto& l2 = eigen.lambdas[1].array();
  MeasureField out;
  out.anisotropy = ScalarField(eigen.shape);
  out.anisotropy.array() = (l2 > eps).select((1.0 - l1 / l2).max(0.0).min(1.0), 0.0);
  return out;
}

MeasureField measures_3d(const EigenField& eigen) {
  if (eigen.shape.rank() != 3) throw ShapeError("measures_3d: need a 3D eigen field");
  const double eps = degeneracy_threshold(eigen);
  // Clamp tiny negative eigenvalues from rounding so ratios stay in [0, 1].
  const Eigen::ArrayXd l1 = eigen.lambdas[0].array().max(0.0);
  const Eigen::ArrayXd l2 = eigen.lambdas[1].array().max(0.0);
  const Eigen::ArrayXd l3 = eigen.lambdas[2].array().max(0.0);
  const auto valid = l3 > eps;

  const Eigen::ArrayXd mean = (l1 + l2 + l3) / 3.0;
  const Eigen::ArrayXd spread = (l1 - mean).square() + (l2 - mean).square() + (l3 - mean).square();
  const Eigen::ArrayXd norm = l1.square() + l2.square() + l3.square();

  MeasureField out;
  out.fa = ScalarField(eigen.shape);
  out.linearity = ScalarField(eigen.shape);
  out.planarity = ScalarField(eigen.shape);
  out.sphericity = ScalarField(eigen.shape);
  out.fa.array() = valid.select((1.5 * spread / norm).sqrt().min(1.0), 0.0);
  out.linearity.array() = valid.select((l2 - l1) / l3, 0.0);
  out.planarity.array() = valid.select((l3 - l2) / l3, 0.0);
  out.sphericity.array() = valid.select(l1 / l3, 1.0);
  return out;
}

std::vector<ScalarField> orientation(const EigenField& eigen) {
  std::vector<ScalarField> out;
  if (eigen.shape.rank() == 2) {
    ScalarField angle(eigen.shape);
    const auto& vy = eigen.principal[0];
    const auto& vx = eigen.principal[1];
    for (Index p = 0; p < angle.size(); ++p) {
      double a = std::atan2(vy[p], vx[p]);
      if (a <= 0.0) a += std::numbers::pi;
      angle[p] = a;
    }
    out.push_back(std::move(angle));
  } else {
    out.push_back(eigen.principal[2]);
    out.push_back(eigen.principal[1]);
    out.push_back(eigen.principal[0]);
  }
  return out;
}

}  // namespace tensorscale
