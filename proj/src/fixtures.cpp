#include "acs/fixtures.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "acs/errors.hpp"
#include "acs/parallel.hpp"

namespace acs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix random_tangent_at(const Matrix& J, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int m = static_cast<int>(J.rows());
  Matrix T(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) T(i, j) = normal(rng);
  return tangent_projection(T, J, MetricAtPoint<double>::identity(m)) / 4.0;
}

}  // namespace

AcsField sphere_fixture(int n, const Grid& grid) {
  if (grid.dim() != 2 * n) throw Error(ErrorKind::invalid_input, "sphere_fixture: grid dimension must be 2n");
  AcsField J{MatrixField::constant(grid, standard_acs<double>(n))};
  J.set_residuals(std::vector<double>(grid.size(), 0.0));
  return J;
}

SmoothRandomFunction::SmoothRandomFunction(const Grid& grid, std::uint64_t seed, int modes, int max_wavenumber)
    : m_(grid.dim()) {
  if (modes < 1 || max_wavenumber < 1) throw Error(ErrorKind::invalid_input, "SmoothRandomFunction: bad mode counts");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> wave(-max_wavenumber, max_wavenumber);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < modes; ++k) {
    Mode mode;
    mode.k.resize(m_);
    bool zero = true;
    while (zero) {
      for (int a = 0; a < m_; ++a) {
        mode.k[a] = wave(rng);
        zero = zero && mode.k[a] == 0;
      }
    }
    // angular frequency per unit length; integer multiples of the box period
    for (int a = 0; a < m_; ++a) {
      const double length = grid.extent(a) * grid.spacing();
      mode.k[a] *= kTwoPi / length;
    }
    mode.amplitude = 2.0 * unit(rng) - 1.0;
    mode.phase = kTwoPi * unit(rng);
    modes_.push_back(std::move(mode));
  }
}

double SmoothRandomFunction::operator()(const double* x) const {
  double f = 0;
  for (const Mode& mode : modes_) {
    double arg = mode.phase;
    for (int a = 0; a < m_; ++a) arg += mode.k[a] * x[a];
    f += mode.amplitude * std::cos(arg);
  }
  return f;
}

AcsField perturbed_j0(const Grid& grid, double amplitude, std::uint64_t seed) {
  const int m = grid.dim();
  if (m % 2 != 0) throw Error(ErrorKind::invalid_input, "perturbed_j0: grid dimension must be even");
  if (!(amplitude >= 0.0 && amplitude < 1.0)) {
    throw Error(ErrorKind::invalid_input, "perturbed_j0: amplitude must lie in [0, 1)");
  }
  const Matrix J0 = standard_acs<double>(m / 2);
  std::mt19937_64 rng(seed);
  const int basis_size = 3;
  std::vector<Matrix> basis;
  std::vector<SmoothRandomFunction> coeff;
  for (int k = 0; k < basis_size; ++k) {
    basis.push_back(random_tangent_at(J0, rng));
    coeff.emplace_back(grid, rng(), 2, 1);
  }

  const std::size_t n = grid.size();
  std::vector<double> S(n * m * m);
  parallel::for_range(n, [&](std::size_t b, std::size_t e) {
    std::vector<double> x(m);
    for (std::size_t p = b; p < e; ++p) {
      grid.point(p, x.data());
      MatrixMap Sp(S.data() + p * m * m, m, m);
      Sp.setZero();
      for (int k = 0; k < basis_size; ++k) Sp += coeff[k](x.data()) * basis[k];
    }
  });
  const double peak = parallel::max(n, [&](std::size_t p) {
    return ConstMatrixMap(S.data() + p * m * m, m, m).operatorNorm();
  });
  const double scale = peak > 0 ? amplitude / peak : 0.0;

  AcsField J{MatrixField(grid)};
  std::vector<double> residual(n);
  const auto id = MetricAtPoint<double>::identity(m);
  parallel::for_range(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const Matrix Sp = scale * ConstMatrixMap(S.data() + p * m * m, m, m);
      const Matrix Jp = nearest_compatible(cayley_chart_inv(Sp, J0), id);
      J.at(p) = Jp;
      residual[p] = std::max(acs_residual(Jp), skew_residual(Jp, id));
    }
  });
  J.set_residuals(std::move(residual));
  return J;
}

MatrixField random_test_field(const Grid& grid, std::uint64_t seed) {
  const int m = grid.dim();
  std::mt19937_64 rng(seed);
  std::vector<SmoothRandomFunction> entries;
  for (int k = 0; k < m * m; ++k) entries.emplace_back(grid, rng(), 3, 2);
  MatrixField T(grid);
  parallel::for_range(grid.size(), [&](std::size_t b, std::size_t e) {
    std::vector<double> x(m);
    for (std::size_t p = b; p < e; ++p) {
      grid.point(p, x.data());
      double* out = T.values().data() + p * m * m;
      for (int k = 0; k < m * m; ++k) out[k] = entries[k](x.data());
    }
  });
  const double sup = T.sup_norm();
  if (sup > 0)
    for (double& v : T.values()) v /= sup;
  return T;
}

MatrixField random_tangent_field(const MatrixField& J, const MetricField& g, std::uint64_t seed) {
  const Grid& grid = J.grid();
  if (g.dim() != grid.dim()) throw Error(ErrorKind::invalid_input, "random_tangent_field: metric dimension mismatch");
  MatrixField T = random_test_field(grid, seed);
  parallel::for_range(grid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const Matrix Tp = T.at(p);
      const Matrix Jp = J.at(p);
      T.at(p) = tangent_projection(Tp, Jp, g.at(grid.point(p))) / 4.0;
    }
  });
  return T;
}

VectorField3 random_unit_field(const Grid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector3d base(normal(rng), normal(rng), normal(rng));
  base.normalize();
  std::vector<SmoothRandomFunction> v;
  for (int k = 0; k < 3; ++k) v.emplace_back(grid, rng(), 3, 2);
  // each component is bounded by 3 (three unit-amplitude modes); 0.7/(3 sqrt 3)
  // keeps |v| < 0.7 so the normalization never degenerates
  const double amp = 0.7 / (3.0 * std::sqrt(3.0));
  VectorField3 u{grid, std::vector<double>(3 * grid.size())};
  parallel::for_range(grid.size(), [&](std::size_t b, std::size_t e) {
    std::vector<double> x(grid.dim());
    for (std::size_t p = b; p < e; ++p) {
      grid.point(p, x.data());
      Eigen::Vector3d w = base;
      for (int k = 0; k < 3; ++k) w(k) += amp * v[k](x.data());
      Eigen::Map<Eigen::Vector3d>(u.values.data() + 3 * p) = w.normalized();
    }
  });
  return u;
}

AcsField winding_field(const Grid& grid) {
  if (grid.dim() != 4) throw Error(ErrorKind::invalid_input, "winding_field: needs a four-dimensional grid");
  VectorField3 u{grid, std::vector<double>(3 * grid.size())};
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double x1 = grid.point(p)(0);
    const double phi = kTwoPi * x1 + 0.3 * std::sin(kTwoPi * x1);
    u.values[3 * p] = std::cos(phi);
    u.values[3 * p + 1] = std::sin(phi);
    u.values[3 * p + 2] = 0.0;
  }
  return dim4_lift(u, Chirality::plus);
}

AcsField homogeneous_cone(const Grid& grid, const std::function<Eigen::Vector3d(const Eigen::Vector4d&)>& u,
                          Chirality chirality) {
  if (grid.dim() != 4) throw Error(ErrorKind::invalid_input, "homogeneous_cone: needs a four-dimensional grid");
  VectorField3 field{grid, std::vector<double>(3 * grid.size())};
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Eigen::Vector4d x = grid.point(p);
    const double r = x.norm();
    if (r == 0.0) throw Error(ErrorKind::invalid_input, "homogeneous_cone: grid contains the apex");
    const Eigen::Vector3d v = u(x / r);
    Eigen::Map<Eigen::Vector3d>(field.values.data() + 3 * p) = v.normalized();
  }
  return dim4_lift(field, chirality);
}

Eigen::Vector3d hopf_map(const Eigen::Vector4d& x) {
  const double a = x(0), b = x(1), c = x(2), d = x(3);
  // z1 = a + ib, z2 = c + id
  return {a * a + b * b - c * c - d * d, 2.0 * (a * c + b * d), 2.0 * (b * c - a * d)};
}

}  // namespace acs
