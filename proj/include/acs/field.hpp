#pragma once

// Grid fields of 2n x 2n matrices and the discrete operators acting on them.
//
// Derivatives are second-order central differences (periodic wrap, one-sided
// at Dirichlet boundary points). The rough Laplacian is the discrete adjoint
// of that derivative under the quadrature used by energy(), so that it is the
// exact negative half-gradient of the discrete energy: for periodic grids, or
// test fields vanishing on the frozen layer,
//   weak_residual(J, g, T) == -<harmonic_residual(J, g), T>
// holds up to rounding.

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "acs/geometry.hpp"
#include "acs/grid.hpp"
#include "acs/matalg.hpp"

namespace acs {

using Matrix = SquareMatrix<double>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;

class MatrixField {
 public:
  MatrixField() = default;
  explicit MatrixField(Grid grid);
  MatrixField(Grid grid, std::vector<double> values);
  static MatrixField constant(Grid grid, const Matrix& value);

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  std::size_t points() const { return grid_.size(); }
  std::size_t stride() const { return static_cast<std::size_t>(dim()) * dim(); }

  MatrixMap at(std::size_t i) { return MatrixMap(values_.data() + i * stride(), dim(), dim()); }
  ConstMatrixMap at(std::size_t i) const { return ConstMatrixMap(values_.data() + i * stride(), dim(), dim()); }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool all_finite() const;
  /// Largest |entry| over all points.
  double sup_norm() const;

 protected:
  Grid grid_;
  std::vector<double> values_;
};

/// Matrix field meant to satisfy J^2 = -id and g-skewness pointwise. Carries
/// the per-point constraint residual max(||J^2 + id||_max, ||g J^T g^-1 + J||_max)
/// from the last projection or update_residuals call.
class AcsField : public MatrixField {
 public:
  AcsField() = default;
  explicit AcsField(MatrixField field) : MatrixField(std::move(field)) {}
  AcsField(Grid grid, std::vector<double> values) : MatrixField(std::move(grid), std::move(values)) {}

  const std::vector<double>& constraint_residual() const { return residual_; }
  double max_constraint_residual() const;
  void update_residuals(const MetricField& g);
  void set_residuals(std::vector<double> r) { residual_ = std::move(r); }

 private:
  std::vector<double> residual_;
};

struct ScalarField {
  Grid grid;
  std::vector<double> values;
  double sup() const;
};

/// values[((p*m + a)*m + i)*m + j] = (nabla_a J)_i^j at point p.
struct CovariantDerivField {
  Grid grid;
  std::vector<double> values;
  ConstMatrixMap at(std::size_t p, int a) const {
    const int m = grid.dim();
    return ConstMatrixMap(values.data() + (p * m + a) * m * m, m, m);
  }
};

/// A field with the same matrix at every point of a grid, never stored.
struct ConstantField {
  Grid grid;
  Matrix value;
};

/// Point weights: 1 for points entering quadrature sums (interior points of
/// the grid inside the metric's truncation ball), else 0.
std::vector<unsigned char> quadrature_mask(const Grid& grid, const GridMetric& metric);

CovariantDerivField covariant_derivative(const MatrixField& J, const MetricField& g);
ScalarField energy_density(const MatrixField& J, const MetricField& g);
/// Midpoint quadrature of |nabla J|^2 sqrt(det g) over interior points.
double energy(const MatrixField& J, const MetricField& g);
double p_energy(const MatrixField& J, const MetricField& g, double p);

/// |nabla J|^2 of a constant matrix at x (only the connection term survives).
double energy_density(const Matrix& J, const MetricField& g, const double* x);
double p_energy(const ConstantField& J, const MetricField& g, double p);

MatrixField rough_laplacian(const MatrixField& J, const MetricField& g);
/// g^{pq} J nabla_p J nabla_q J.
MatrixField nonlinearity(const MatrixField& J, const MetricField& g);

struct HarmonicResidual {
  MatrixField field;  // Delta J - J nabla_p J nabla_p J
  double sup = 0;     // max |entry| of field
  double commutator_sup = 0;  // max |entry| of [Delta J, J]
};
HarmonicResidual harmonic_residual(const MatrixField& J, const MetricField& g);

/// int <nabla J, nabla T> dv + int <J nabla_p J nabla_p J, T> dv.
double weak_residual(const MatrixField& J, const MetricField& g, const MatrixField& T);
/// Discrete L2 inner product int <A, B>_g dv with the energy quadrature.
double l2_inner(const MatrixField& A, const MatrixField& B, const MetricField& g);
/// sqrt(int |T|^2 + |nabla T|^2 dv).
double w12_norm(const MatrixField& T, const MetricField& g);

/// Pointwise g^{ij} g_{kl} J_i^k J_j^l.
ScalarField pointwise_norm_squared(const MatrixField& J, const MetricField& g);

enum class ProjectionMode {
  /// compatible_projection: requires J^2 = -id to 1e-8 at every point.
  strict,
  /// nearest_compatible: any matrix with invertible skew part.
  nearest,
};

/// Pointwise projection onto g-compatible structures. Errors name the grid index.
AcsField project_field(const MatrixField& N, const MetricField& g, ProjectionMode mode = ProjectionMode::strict);

/// Multilinear interpolation of the entries of J at x.
Matrix interpolate(const MatrixField& J, const double* x);

/// Chart dilation z -> J(p + r z) sampled on out_grid, then reprojected.
AcsField dilate(const MatrixField& J, const MetricField& g, const Eigen::VectorXd& p, double r, const Grid& out_grid);

/// J(c + r (x - c)/|x - c|) inside B_r(c), J elsewhere; reprojected.
AcsField radial_cone(const MatrixField& J, const MetricField& g, double r, const Eigen::VectorXd& center);
AcsField radial_cone(const MatrixField& J, const MetricField& g, double r);

}  // namespace acs
