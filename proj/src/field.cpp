#include "acs/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "acs/errors.hpp"
#include "acs/parallel.hpp"
#include "field_kernels.hpp"

namespace acs {

using detail::StencilContext;

MatrixField::MatrixField(Grid grid) : grid_(std::move(grid)) {
  values_.assign(grid_.size() * stride(), 0.0);
}

MatrixField::MatrixField(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size() * stride()) {
    throw Error(ErrorKind::invalid_input, "field values do not match grid size");
  }
}

MatrixField MatrixField::constant(Grid grid, const Matrix& value) {
  if (value.rows() != grid.dim() || value.cols() != grid.dim()) {
    throw Error(ErrorKind::invalid_input, "constant value does not match grid dimension");
  }
  MatrixField f(std::move(grid));
  const std::size_t s = f.stride();
  for (std::size_t p = 0; p < f.points(); ++p) std::copy(value.data(), value.data() + s, f.values_.data() + p * s);
  return f;
}

bool MatrixField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double MatrixField::sup_norm() const {
  double best = 0;
  for (double v : values_) best = std::max(best, std::abs(v));
  return best;
}

double AcsField::max_constraint_residual() const {
  double best = 0;
  for (double r : residual_) best = std::max(best, r);
  return best;
}

namespace {

void require_match(const MatrixField& J, const MetricField& g) {
  if (J.dim() != g.dim()) throw Error(ErrorKind::invalid_input, "field and metric dimensions differ");
}

/// Per-point constraint residual for a conformal metric: g-skewness reduces
/// to plain skewness.
double point_residual(const Matrix& Jm, const MetricField& g, const Grid& grid, std::size_t p) {
  if (g.flat() || g.kind() != MetricKind::conformal) {
    // Euclidean or sphere: conformal factors cancel in g J^T g^-1.
    return std::max(acs_residual(Jm), max_abs(Jm.transpose() + Jm));
  }
  const auto metric = g.at(grid.point(p));
  return std::max(acs_residual(Jm), skew_residual(Jm, metric));
}

}  // namespace

void AcsField::update_residuals(const MetricField& g) {
  require_match(*this, g);
  residual_.assign(points(), 0.0);
  parallel::for_range(points(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) residual_[p] = point_residual(at(p), g, grid_, p);
  });
}

double ScalarField::sup() const {
  double best = 0;
  for (double v : values) best = std::max(best, std::abs(v));
  return best;
}

std::vector<unsigned char> quadrature_mask(const Grid& grid, const GridMetric& metric) {
  return StencilContext(grid, metric).counted;
}

CovariantDerivField covariant_derivative(const MatrixField& J, const MetricField& g) {
  require_match(J, g);
  const GridMetric gm = sample_metric(g, J.grid());
  const StencilContext c(J.grid(), gm);
  CovariantDerivField out{J.grid(), std::vector<double>(J.points() * J.stride() * J.dim())};
  detail::derivative_pass(c, J.values().data(), out.values.data(), nullptr);
  return out;
}

ScalarField energy_density(const MatrixField& J, const MetricField& g) {
  require_match(J, g);
  const GridMetric gm = sample_metric(g, J.grid());
  const StencilContext c(J.grid(), gm);
  ScalarField out{J.grid(), std::vector<double>(J.points())};
  detail::derivative_pass(c, J.values().data(), nullptr, out.values.data());
  return out;
}

double p_energy(const MatrixField& J, const MetricField& g, double p) {
  if (!(p >= 1)) throw Error(ErrorKind::invalid_input, "p_energy: p must be >= 1");
  require_match(J, g);
  const GridMetric gm = sample_metric(g, J.grid());
  const StencilContext c(J.grid(), gm);
  std::vector<double> dens(J.points());
  detail::derivative_pass(c, J.values().data(), nullptr, dens.data());
  if (p == 2) return detail::quadrature(c, [&](std::size_t q) { return dens[q]; });
  return detail::quadrature(c, [&](std::size_t q) { return std::pow(dens[q], 0.5 * p); });
}

double energy(const MatrixField& J, const MetricField& g) { return p_energy(J, g, 2.0); }

double energy_density(const Matrix& J, const MetricField& g, const double* x) {
  if (g.flat()) return 0.0;
  const int m = g.dim();
  if (J.rows() != m) throw Error(ErrorKind::invalid_input, "matrix and metric dimensions differ");
  double d[detail::kMaxDim], v[detail::kMaxDim], w[detail::kMaxDim];
  g.du(x, d);
  for (int i = 0; i < m; ++i) {
    v[i] = 0;
    w[i] = 0;
    for (int k = 0; k < m; ++k) {
      v[i] += J(i, k) * d[k];
      w[i] += d[k] * J(k, i);
    }
  }
  double sum = 0;
  for (int a = 0; a < m; ++a) {
    // nabla_a J = 1/2 (J K_a - K_a J), K_a = du e_a^T - e_a du^T
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double e = -J(i, a) * d[j] - d[i] * J(a, j);
        if (j == a) e += v[i];
        if (i == a) e += w[j];
        sum += 0.25 * e * e;
      }
    }
  }
  return std::exp(-g.u(x)) * sum;
}

double p_energy(const ConstantField& J, const MetricField& g, double p) {
  if (!(p >= 1)) throw Error(ErrorKind::invalid_input, "p_energy: p must be >= 1");
  const Grid& grid = J.grid;
  if (grid.dim() != g.dim()) throw Error(ErrorKind::invalid_input, "field and metric dimensions differ");
  const int m = grid.dim();
  const double trunc = g.truncation_radius();
  const double vol = grid.cell_volume();
  return vol * parallel::sum(grid.size(), [&](std::size_t q) {
           if (!grid.is_interior(q)) return 0.0;
           double x[detail::kMaxDim];
           grid.point(q, x);
           double r2 = 0;
           for (int a = 0; a < m; ++a) r2 += x[a] * x[a];
           if (std::isfinite(trunc) && r2 > trunc * trunc) return 0.0;
           const double dens = energy_density(J.value, g, x);
           const double jac = std::exp(0.5 * m * g.u(x));
           return std::pow(dens, 0.5 * p) * jac;
         });
}

MatrixField rough_laplacian(const MatrixField& J, const MetricField& g) {
  require_match(J, g);
  const GridMetric gm = sample_metric(g, J.grid());
  const StencilContext c(J.grid(), gm);
  std::vector<double> X(J.points() * J.stride() * J.dim());
  detail::derivative_pass(c, J.values().data(), X.data(), nullptr);
  MatrixField out(J.grid());
  detail::laplacian_pass(c, X.data(), out.values().data());
  return out;
}

MatrixField nonlinearity(const MatrixField& J, const MetricField& g) {
  require_match(J, g);
  const GridMetric gm = sample_metric(g, J.grid());
  const StencilContext c(J.grid(), gm);
  std::vector<double> X(J.points() * J.stride() * J.dim());
  detail::derivative_pass(c, J.values().data(), X.data(), nullptr);
  MatrixField out(J.grid());
  detail::nonlinearity_pass(c, J.values().data(), X.data(), out.values().data());
  return out;
}

HarmonicResidual harmonic_residual(const MatrixField& J, const MetricField& g) {
  require_match(J, g);
  const GridMetric gm = sample_metric(g, J.grid());
  const StencilContext c(J.grid(), gm);
  std::vector<double> X(J.points() * J.stride() * J.dim());
  detail::derivative_pass(c, J.values().data(), X.data(), nullptr);
  MatrixField lap(J.grid());
  detail::laplacian_pass(c, X.data(), lap.values().data());
  HarmonicResidual out{MatrixField(J.grid()), 0, 0};
  detail::residual_pass(c, J.values().data(), X.data(), out.field.values().data());
  out.sup = out.field.sup_norm();
  out.commutator_sup = parallel::max(J.points(), [&](std::size_t p) {
    if (!c.counted[p]) return 0.0;
    const Matrix L = lap.at(p);
    const Matrix Jp = J.at(p);
    return max_abs(L * Jp - Jp * L);
  });
  return out;
}

double l2_inner(const MatrixField& A, const MatrixField& B, const MetricField& g) {
  require_match(A, g);
  if (!A.grid().same_shape(B.grid())) throw Error(ErrorKind::invalid_input, "fields live on different grids");
  const GridMetric gm = sample_metric(g, A.grid());
  const StencilContext c(A.grid(), gm);
  const std::size_t s = A.stride();
  const double* a = A.values().data();
  const double* b = B.values().data();
  return detail::quadrature(c, [&](std::size_t p) {
    double dot = 0;
    for (std::size_t k = 0; k < s; ++k) dot += a[p * s + k] * b[p * s + k];
    return dot;
  });
}

double weak_residual(const MatrixField& J, const MetricField& g, const MatrixField& T) {
  require_match(J, g);
  if (!J.grid().same_shape(T.grid())) throw Error(ErrorKind::invalid_input, "test field lives on a different grid");
  const GridMetric gm = sample_metric(g, J.grid());
  const StencilContext c(J.grid(), gm);
  const std::size_t s3 = J.points() * J.stride() * J.dim();
  std::vector<double> X(s3), Y(s3);
  detail::derivative_pass(c, J.values().data(), X.data(), nullptr);
  detail::derivative_pass(c, T.values().data(), Y.data(), nullptr);
  MatrixField nl(J.grid());
  detail::nonlinearity_pass(c, J.values().data(), X.data(), nl.values().data());
  const std::size_t s = J.stride();
  const std::size_t sd = s * J.dim();
  const double* t = T.values().data();
  const double* n = nl.values().data();
  return detail::quadrature(c, [&](std::size_t p) {
    double grad = 0;
    for (std::size_t k = 0; k < sd; ++k) grad += X[p * sd + k] * Y[p * sd + k];
    double zero = 0;
    for (std::size_t k = 0; k < s; ++k) zero += n[p * s + k] * t[p * s + k];
    return c.inverse_metric(p) * grad + zero;
  });
}

double w12_norm(const MatrixField& T, const MetricField& g) {
  require_match(T, g);
  const GridMetric gm = sample_metric(g, T.grid());
  const StencilContext c(T.grid(), gm);
  std::vector<double> Y(T.points() * T.stride() * T.dim());
  std::vector<double> dens(T.points());
  detail::derivative_pass(c, T.values().data(), Y.data(), dens.data());
  const std::size_t s = T.stride();
  const double* t = T.values().data();
  const double sq = detail::quadrature(c, [&](std::size_t p) {
    double v = 0;
    for (std::size_t k = 0; k < s; ++k) v += t[p * s + k] * t[p * s + k];
    return v + dens[p];
  });
  return std::sqrt(sq);
}

ScalarField pointwise_norm_squared(const MatrixField& J, const MetricField& g) {
  require_match(J, g);
  // g^{ij} g_{kl} J_i^k J_j^l: the conformal factors cancel.
  ScalarField out{J.grid(), std::vector<double>(J.points())};
  parallel::for_range(J.points(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) out.values[p] = J.at(p).squaredNorm();
  });
  return out;
}

AcsField project_field(const MatrixField& N, const MetricField& g, ProjectionMode mode) {
  require_match(N, g);
  const Grid& grid = N.grid();
  AcsField out(grid, std::vector<double>(N.values().size()));
  std::vector<double> residual(N.points());
  const bool conformal_factor_cancels = g.kind() != MetricKind::conformal;
  const auto identity = MetricAtPoint<double>::identity(N.dim());
  parallel::for_range(N.points(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const Matrix Np = N.at(p);
      const MetricAtPoint<double> metric = conformal_factor_cancels ? identity : g.at(grid.point(p));
      Matrix J;
      try {
        J = mode == ProjectionMode::strict ? compatible_projection(Np, metric) : nearest_compatible(Np, metric);
      } catch (const Error& err) {
        throw Error(err.kind(), "grid index " + std::to_string(p) + ": " + err.what());
      }
      out.at(p) = J;
      residual[p] = std::max(acs_residual(J), skew_residual(J, metric));
    }
  });
  out.set_residuals(std::move(residual));
  return out;
}

Matrix interpolate(const MatrixField& J, const double* x) {
  const Grid& g = J.grid();
  const int m = g.dim();
  if (!g.contains(x)) throw Error(ErrorKind::invalid_input, "interpolation point outside the field domain");
  int base[detail::kMaxDim];
  double frac[detail::kMaxDim];
  for (int a = 0; a < m; ++a) {
    const double t = (x[a] - g.origin()[a]) / g.spacing();
    const int e = g.extent(a);
    int i = static_cast<int>(std::floor(t));
    double f = t - i;
    if (g.periodic()) {
      i = ((i % e) + e) % e;
    } else {
      if (i < 0) { i = 0; f = 0; }
      if (i >= e - 1) { i = e - 2; f = 1; }
    }
    base[a] = i;
    frac[a] = f;
  }
  Matrix out = Matrix::Zero(m, m);
  int corner[detail::kMaxDim];
  for (long mask = 0; mask < (1L << m); ++mask) {
    double w = 1;
    for (int a = 0; a < m && w != 0; ++a) {
      const bool up = (mask >> a) & 1;
      w *= up ? frac[a] : 1 - frac[a];
      corner[a] = up ? (base[a] + 1) % g.extent(a) : base[a];
    }
    if (w == 0) continue;
    out += w * J.at(g.ravel(corner));
  }
  return out;
}

namespace {

Matrix project_point(const Matrix& N, const MetricField& g, const double* x) {
  if (g.kind() == MetricKind::conformal) {
    Eigen::Map<const Eigen::VectorXd> xv(x, g.dim());
    return nearest_compatible(N, g.at(xv));
  }
  return nearest_compatible(N, MetricAtPoint<double>::identity(g.dim()));
}

}  // namespace

AcsField dilate(const MatrixField& J, const MetricField& g, const Eigen::VectorXd& p, double r, const Grid& out_grid) {
  require_match(J, g);
  const int m = J.dim();
  if (out_grid.dim() != m || p.size() != m) throw Error(ErrorKind::invalid_input, "dilate: dimension mismatch");
  if (!(r > 0)) throw Error(ErrorKind::invalid_input, "dilate: r must be positive");
  MatrixField raw(out_grid);
  parallel::for_range(out_grid.size(), [&](std::size_t b, std::size_t e) {
    double z[detail::kMaxDim], x[detail::kMaxDim];
    for (std::size_t q = b; q < e; ++q) {
      out_grid.point(q, z);
      for (int a = 0; a < m; ++a) x[a] = p(a) + r * z[a];
      if (!J.grid().contains(x)) throw Error(ErrorKind::invalid_input, "dilate: image point outside source domain");
      raw.at(q) = project_point(interpolate(J, x), g, x);
    }
  });
  AcsField out(std::move(raw));
  out.update_residuals(g);
  return out;
}

AcsField radial_cone(const MatrixField& J, const MetricField& g, double r, const Eigen::VectorXd& center) {
  require_match(J, g);
  const Grid& grid = J.grid();
  const int m = grid.dim();
  const double h = grid.spacing();
  if (center.size() != m) throw Error(ErrorKind::invalid_input, "radial_cone: center dimension mismatch");
  if (!(r >= 3 * h)) throw Error(ErrorKind::degenerate_scale, "radial_cone: r must be at least 3h");
  MatrixField out = J;
  std::vector<unsigned char> near_center(grid.size(), 0);
  parallel::for_range(grid.size(), [&](std::size_t b, std::size_t e) {
    double x[detail::kMaxDim], d[detail::kMaxDim], y[detail::kMaxDim];
    for (std::size_t q = b; q < e; ++q) {
      grid.point(q, x);
      grid.displacement(x, center.data(), d);
      double dist2 = 0;
      for (int a = 0; a < m; ++a) dist2 += d[a] * d[a];
      const double dist = std::sqrt(dist2);
      if (dist >= r) continue;
      if (dist < h * (1 - 1e-9)) {
        near_center[q] = 1;
        continue;
      }
      for (int a = 0; a < m; ++a) y[a] = center(a) + r * d[a] / dist;
      out.at(q) = project_point(interpolate(J, y), g, y);
    }
  });
  // Cells at the apex: average of the axis neighbours that were filled, then project.
  for (std::size_t q = 0; q < grid.size(); ++q) {
    if (!near_center[q]) continue;
    int multi[detail::kMaxDim];
    grid.unravel(q, multi);
    Matrix sum = Matrix::Zero(m, m);
    int count = 0;
    for (int a = 0; a < m; ++a) {
      for (int step : {-1, 1}) {
        int nb[detail::kMaxDim];
        std::copy(multi, multi + m, nb);
        nb[a] += step;
        if (grid.periodic()) {
          nb[a] = (nb[a] + grid.extent(a)) % grid.extent(a);
        } else if (nb[a] < 0 || nb[a] >= grid.extent(a)) {
          continue;
        }
        const std::size_t k = grid.ravel(nb);
        if (near_center[k]) continue;
        sum += out.at(k);
        ++count;
      }
    }
    if (count == 0) throw Error(ErrorKind::degenerate_scale, "radial_cone: apex cell has no filled neighbours");
    double x[detail::kMaxDim];
    grid.point(q, x);
    out.at(q) = project_point(Matrix(sum / count), g, x);
  }
  AcsField result(std::move(out));
  result.update_residuals(g);
  return result;
}

AcsField radial_cone(const MatrixField& J, const MetricField& g, double r) {
  return radial_cone(J, g, r, Eigen::VectorXd::Zero(J.dim()));
}

}  // namespace acs
