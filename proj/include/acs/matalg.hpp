#pragma once

// Pointwise constructions on real 2n x 2n matrices: constraint checks, the
// canonical g-compatible projection, the Cayley chart around a base structure,
// the tangent projection onto the linearized constraints and the homotopy to
// the projected structure.
//
// Index convention: N(i, j) = N_i^j, i.e. the row carries the lower index.
// With this convention the g-transpose is g * N^T * g^{-1} and, for a factor
// g = G G^T, G^{-1} N G is the matrix in a g-orthonormal frame.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "acs/errors.hpp"

namespace acs {

template <class Scalar, int Dim = Eigen::Dynamic>
using SquareMatrix = Eigen::Matrix<Scalar, Dim, Dim, Eigen::RowMajor>;

template <class Scalar, int Dim = Eigen::Dynamic>
using ColumnVector = Eigen::Matrix<Scalar, Dim, 1>;

/// Input accepted as an almost complex structure.
inline constexpr double kAcceptTol = 1e-8;
/// Certified accuracy of projected outputs.
inline constexpr double kCertifyTol = 1e-10;

template <class Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& a) {
  return a.size() == 0 ? typename Derived::Scalar(0) : a.cwiseAbs().maxCoeff();
}

/// A Riemannian metric at one point together with a factor g = G G^T.
template <class Scalar, int Dim = Eigen::Dynamic>
struct MetricAtPoint {
  using Matrix = SquareMatrix<Scalar, Dim>;

  Matrix g;
  Matrix g_inv;
  Matrix G;
  Matrix G_inv;

  Eigen::Index dim() const { return g.rows(); }

  static MetricAtPoint identity(Eigen::Index m) {
    const Matrix id = Matrix::Identity(m, m);
    return {id, id, id, id};
  }

  /// Uses the Cholesky factor as G.
  static MetricAtPoint from_metric(const Matrix& metric) {
    const Matrix sym = symmetrized(metric, "metric");
    Eigen::LLT<Matrix> llt(sym);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorKind::domain_error, "metric is not positive definite");
    }
    const Matrix id = Matrix::Identity(sym.rows(), sym.cols());
    Matrix lower = llt.matrixL();
    Matrix lower_inv = lower.template triangularView<Eigen::Lower>().solve(id);
    Matrix inv = lower_inv.transpose() * lower_inv;
    inv = (0.5 * (inv + inv.transpose())).eval();
    return {sym, inv, lower, lower_inv};
  }

  /// Same metric with a caller-supplied factor (any G with G G^T = g).
  static MetricAtPoint with_factor(const Matrix& metric, const Matrix& factor) {
    MetricAtPoint out = from_metric(metric);
    if (factor.rows() != metric.rows() || factor.cols() != metric.cols()) {
      throw Error(ErrorKind::invalid_input, "factor dimension mismatch");
    }
    const Scalar scale = std::max<Scalar>(Scalar(1), max_abs(out.g));
    if (max_abs(factor * factor.transpose() - out.g) > Scalar(1e-12) * scale) {
      throw Error(ErrorKind::invalid_input, "factor does not satisfy G G^T = g");
    }
    out.G = factor;
    out.G_inv = factor.inverse();
    return out;
  }

 private:
  static Matrix symmetrized(const Matrix& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() < 1) {
      throw Error(ErrorKind::invalid_input, std::string(what) + " must be square");
    }
    if (!a.allFinite()) throw Error(ErrorKind::invalid_input, std::string(what) + " has non-finite entries");
    const Scalar scale = std::max<Scalar>(Scalar(1), max_abs(a));
    if (max_abs(a - a.transpose()) > Scalar(1e-12) * scale) {
      throw Error(ErrorKind::invalid_input, std::string(what) + " is not symmetric");
    }
    return (Scalar(0.5) * (a + a.transpose())).eval();
  }
};

namespace detail {

template <class Derived>
void require_square_finite(const Eigen::MatrixBase<Derived>& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw Error(ErrorKind::invalid_input, std::string(what) + " must be square");
  }
  if (!a.allFinite()) {
    throw Error(ErrorKind::invalid_input, std::string(what) + " has non-finite entries");
  }
}

template <class Scalar, int Dim>
void require_same_dim(const SquareMatrix<Scalar, Dim>& a, const MetricAtPoint<Scalar, Dim>& g) {
  if (a.rows() != g.dim()) throw Error(ErrorKind::invalid_input, "dimension mismatch with metric");
}

}  // namespace detail

/// ||N N + id||_max.
template <class Scalar, int Dim>
Scalar acs_residual(const SquareMatrix<Scalar, Dim>& N) {
  return max_abs((N * N).eval() + SquareMatrix<Scalar, Dim>::Identity(N.rows(), N.cols()));
}

template <class Scalar, int Dim>
SquareMatrix<Scalar, Dim> g_transpose(const SquareMatrix<Scalar, Dim>& N, const MetricAtPoint<Scalar, Dim>& g) {
  detail::require_square_finite(N, "matrix");
  detail::require_same_dim(N, g);
  return g.g * N.transpose() * g.g_inv;
}

/// ||g N^T g^{-1} + N||_max, zero exactly for g-skew (compatible) N.
template <class Scalar, int Dim>
Scalar skew_residual(const SquareMatrix<Scalar, Dim>& N, const MetricAtPoint<Scalar, Dim>& g) {
  return max_abs(g.g * N.transpose() * g.g_inv + N);
}

template <class Scalar, int Dim>
bool is_acs(const SquareMatrix<Scalar, Dim>& N, Scalar tol) {
  detail::require_square_finite(N, "matrix");
  return acs_residual(N) <= tol;
}

template <class Scalar, int Dim>
bool is_g_compatible(const SquareMatrix<Scalar, Dim>& N, const MetricAtPoint<Scalar, Dim>& g, Scalar tol) {
  detail::require_square_finite(N, "matrix");
  detail::require_same_dim(N, g);
  return skew_residual(N, g) <= tol;
}

template <class Scalar, int Dim>
struct SymmetricEigen {
  ColumnVector<Scalar, Dim> values;
  SquareMatrix<Scalar, Dim> vectors;
  int sweeps = 0;
};

/// Cyclic Jacobi diagonalization of a symmetric matrix. Sweeps until the
/// largest off-diagonal entry is at most rel_tol * ||P||_F.
template <class Scalar, int Dim>
SymmetricEigen<Scalar, Dim> jacobi_eigen(const SquareMatrix<Scalar, Dim>& P, Scalar rel_tol = Scalar(1e-13)) {
  constexpr int kMaxSweeps = 64;
  const Eigen::Index m = P.rows();
  SquareMatrix<Scalar, Dim> a = P;
  SquareMatrix<Scalar, Dim> v = SquareMatrix<Scalar, Dim>::Identity(m, m);
  const Scalar threshold = rel_tol * P.norm();

  for (int sweep = 0; sweep <= kMaxSweeps; ++sweep) {
    Scalar off = 0;
    for (Eigen::Index p = 0; p < m; ++p)
      for (Eigen::Index q = p + 1; q < m; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= threshold) {
      return {a.diagonal(), v, sweep};
    }
    for (Eigen::Index p = 0; p < m; ++p) {
      for (Eigen::Index q = p + 1; q < m; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
        Scalar t;
        if (std::abs(theta) > Scalar(1e150)) {
          t = Scalar(0.5) / theta;
        } else {
          t = (theta >= 0 ? Scalar(1) : Scalar(-1)) / (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
        }
        const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
        const Scalar s = t * c;
        for (Eigen::Index k = 0; k < m; ++k) {
          const Scalar akp = a(k, p);
          const Scalar akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < m; ++k) {
          const Scalar apk = a(p, k);
          const Scalar aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < m; ++k) {
          const Scalar vkp = v(k, p);
          const Scalar vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  throw Error(ErrorKind::internal_error, "Jacobi diagonalization did not converge");
}

namespace detail {

template <class Scalar, int Dim>
SquareMatrix<Scalar, Dim> spectral_function(const SymmetricEigen<Scalar, Dim>& eig, Scalar (*f)(Scalar)) {
  ColumnVector<Scalar, Dim> fv = eig.values.unaryExpr(f);
  SquareMatrix<Scalar, Dim> out = eig.vectors * fv.asDiagonal() * eig.vectors.transpose();
  return (Scalar(0.5) * (out + out.transpose())).eval();
}

template <class Scalar>
Scalar sqrt_of(Scalar x) { return std::sqrt(x); }

template <class Scalar>
Scalar inv_sqrt_of(Scalar x) { return Scalar(1) / std::sqrt(x); }

/// Q^{-1} A for skew A and Q = sqrt(A^T A); the closest skew orthogonal
/// matrix to A. Throws when A is (numerically) singular.
template <class Scalar, int Dim>
SquareMatrix<Scalar, Dim> skew_polar(const SquareMatrix<Scalar, Dim>& A) {
  const SquareMatrix<Scalar, Dim> P = A.transpose() * A;
  const auto eig = jacobi_eigen(P);
  const Scalar top = eig.values.maxCoeff();
  if (!(eig.values.minCoeff() > Scalar(1e-14) * std::max(top, Scalar(1e-300)))) {
    throw Error(ErrorKind::domain_error, "skew part is singular; no compatible structure nearby");
  }
  const SquareMatrix<Scalar, Dim> q_inv = spectral_function(eig, &inv_sqrt_of<Scalar>);
  SquareMatrix<Scalar, Dim> K = q_inv * A;
  return (Scalar(0.5) * (K - K.transpose())).eval();
}

}  // namespace detail

/// Square root of a symmetric positive-definite matrix as a spectral function,
/// so it commutes with everything that commutes with P.
template <class Scalar, int Dim>
SquareMatrix<Scalar, Dim> spd_sqrt(const SquareMatrix<Scalar, Dim>& P) {
  detail::require_square_finite(P, "matrix");
  const Scalar scale = std::max<Scalar>(Scalar(1), max_abs(P));
  if (max_abs(P - P.transpose()) > Scalar(1e-12) * scale) {
    throw Error(ErrorKind::domain_error, "spd_sqrt: matrix is not symmetric");
  }
  const SquareMatrix<Scalar, Dim> sym = Scalar(0.5) * (P + P.transpose());
  const auto eig = jacobi_eigen(sym);
  if (!(eig.values.minCoeff() > Scalar(0))) {
    throw Error(ErrorKind::domain_error, "spd_sqrt: matrix is not positive definite");
  }
  return detail::spectral_function(eig, &detail::sqrt_of<Scalar>);
}

/// Closest g-compatible almost complex structure to N: in a g-orthonormal
/// frame, the skew part A of G^{-1} N G is replaced by Q^{-1} A with Q^2 = -A^2.
/// When N^2 = -id this is exactly the canonical construction (then
/// -A^2 = id + S^2). No precondition on N^2; used to reproject flow steps
/// and interpolated values.
template <class Scalar, int Dim>
SquareMatrix<Scalar, Dim> nearest_compatible(const SquareMatrix<Scalar, Dim>& N, const MetricAtPoint<Scalar, Dim>& g) {
  detail::require_square_finite(N, "matrix");
  detail::require_same_dim(N, g);
  const SquareMatrix<Scalar, Dim> M = g.G_inv * N * g.G;
  const SquareMatrix<Scalar, Dim> A = Scalar(0.5) * (M - M.transpose());
  return g.G * detail::skew_polar(A) * g.G_inv;
}

/// Canonical g-compatible structure built from an almost complex structure N.
/// Idempotent on compatible input.
template <class Scalar, int Dim>
SquareMatrix<Scalar, Dim> compatible_projection(const SquareMatrix<Scalar, Dim>& N,
                                                const MetricAtPoint<Scalar, Dim>& g) {
  detail::require_square_finite(N, "matrix");
  detail::require_same_dim(N, g);
  if (acs_residual(N) > Scalar(kAcceptTol)) {
    throw Error(ErrorKind::domain_error, "compatible_projection: input does not satisfy N^2 = -id");
  }
  SquareMatrix<Scalar, Dim> out;
  try {
    out = nearest_compatible(N, g);
  } catch (const Error& e) {
    throw Error(ErrorKind::internal_error, std::string("compatible_projection: ") + e.what());
  }
  if (acs_residual(out) > Scalar(kCertifyTol) || skew_residual(out, g) > Scalar(kCertifyTol)) {
    throw Error(ErrorKind::internal_error, "compatible_projection: output failed certification");
  }
  return out;
}

/// The standard structure J0 d_i = d_{n+i}, J0 d_{n+i} = -d_i.
template <class Scalar = double, int Dim = Eigen::Dynamic>
SquareMatrix<Scalar, Dim> standard_acs(Eigen::Index n) {
  SquareMatrix<Scalar, Dim> J = SquareMatrix<Scalar, Dim>::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    J(i, n + i) = Scalar(1);
    J(n + i, i) = Scalar(-1);
  }
  return J;
}

namespace detail {

template <class Scalar, int Dim>
Scalar condition_number(const SquareMatrix<Scalar, Dim>& a) {
  Eigen::JacobiSVD<SquareMatrix<Scalar, Dim>> svd(a);
  const auto& s = svd.singularValues();
  const Scalar smin = s(s.size() - 1);
  if (!(smin > Scalar(0))) return std::numeric_limits<Scalar>::infinity();
  return s(0) / smin;
}

inline constexpr double kChartCondition = 1e12;

}  // namespace detail

/// Chart coordinate S = (J + J0)^{-1} (J - J0); S anticommutes with J0.
template <class Scalar, int Dim>
SquareMatrix<Scalar, Dim> cayley_chart(const SquareMatrix<Scalar, Dim>& J, const SquareMatrix<Scalar, Dim>& J0) {
  detail::require_square_finite(J, "J");
  detail::require_square_finite(J0, "J0");
  if (J.rows() != J0.rows()) throw Error(ErrorKind::invalid_input, "cayley_chart: dimension mismatch");
  if (acs_residual(J) > Scalar(kAcceptTol) || acs_residual(J0) > Scalar(kAcceptTol)) {
    throw Error(ErrorKind::invalid_input, "cayley_chart: arguments must square to -id");
  }
  const SquareMatrix<Scalar, Dim> sum = J + J0;
  if (!(detail::condition_number(sum) <= Scalar(detail::kChartCondition))) {
    throw Error(ErrorKind::chart_out_of_range, "cayley_chart: J + J0 is singular");
  }
  return sum.fullPivLu().solve(J - J0);
}

/// Inverse chart J = J0 (id + S)(id - S)^{-1}.
template <class Scalar, int Dim>
SquareMatrix<Scalar, Dim> cayley_chart_inv(const SquareMatrix<Scalar, Dim>& S, const SquareMatrix<Scalar, Dim>& J0) {
  detail::require_square_finite(S, "S");
  detail::require_square_finite(J0, "J0");
  if (S.rows() != J0.rows()) throw Error(ErrorKind::invalid_input, "cayley_chart_inv: dimension mismatch");
  const Scalar scale = std::max<Scalar>(Scalar(1), max_abs(S));
  if (max_abs(S * J0 + J0 * S) > Scalar(kAcceptTol) * scale) {
    throw Error(ErrorKind::invalid_input, "cayley_chart_inv: S must anticommute with J0");
  }
  const auto id = SquareMatrix<Scalar, Dim>::Identity(S.rows(), S.cols());
  const SquareMatrix<Scalar, Dim> denom = id - S;
  if (!(detail::condition_number(denom) <= Scalar(detail::kChartCondition))) {
    throw Error(ErrorKind::chart_out_of_range, "cayley_chart_inv: id - S is singular");
  }
  // (id + S)(id - S)^{-1} = ((id - S)^{-T} (id + S)^T)^T
  const SquareMatrix<Scalar, Dim> right =
      denom.transpose().fullPivLu().solve((id + S).transpose()).transpose();
  return J0 * right;
}

/// Projection of an arbitrary endomorphism T onto the linearized constraints
/// J S + S J = 0, S g-skew:  S = A - g A^T g^{-1} with A = T + J T J.
/// Acts as 4 * id on matrices already satisfying both constraints.
template <class Scalar, int Dim>
SquareMatrix<Scalar, Dim> tangent_projection(const SquareMatrix<Scalar, Dim>& T, const SquareMatrix<Scalar, Dim>& J,
                                             const MetricAtPoint<Scalar, Dim>& g) {
  detail::require_square_finite(T, "T");
  detail::require_square_finite(J, "J");
  detail::require_same_dim(T, g);
  detail::require_same_dim(J, g);
  const SquareMatrix<Scalar, Dim> A = T + J * T * J;
  return A - g.g * A.transpose() * g.g_inv;
}

/// Path from J (t = 0) to compatible_projection(J, g) (t = 1) through almost
/// complex structures. Built in a g-orthonormal frame.
template <class Scalar, int Dim>
SquareMatrix<Scalar, Dim> homotopy_path(const SquareMatrix<Scalar, Dim>& J, const MetricAtPoint<Scalar, Dim>& g,
                                        Scalar t) {
  detail::require_square_finite(J, "J");
  detail::require_same_dim(J, g);
  if (!(t >= Scalar(0) && t <= Scalar(1))) {
    throw Error(ErrorKind::invalid_input, "homotopy_path: t must lie in [0, 1]");
  }
  if (acs_residual(J) > Scalar(kAcceptTol)) {
    throw Error(ErrorKind::domain_error, "homotopy_path: input does not satisfy J^2 = -id");
  }
  const Eigen::Index m = J.rows();
  const auto id = SquareMatrix<Scalar, Dim>::Identity(m, m);
  const SquareMatrix<Scalar, Dim> M = g.G_inv * J * g.G;
  const SquareMatrix<Scalar, Dim> A = Scalar(0.5) * (M - M.transpose());
  const SquareMatrix<Scalar, Dim> Q = spd_sqrt(SquareMatrix<Scalar, Dim>(A.transpose() * A));
  const SquareMatrix<Scalar, Dim> K = detail::skew_polar(A);
  const SquareMatrix<Scalar, Dim> N = (Scalar(1) - t) * M + t * K;
  const SquareMatrix<Scalar, Dim> P2 = id + Scalar(2) * t * (Scalar(1) - t) * (Q - id);
  const SquareMatrix<Scalar, Dim> P = spd_sqrt(SquareMatrix<Scalar, Dim>(Scalar(0.5) * (P2 + P2.transpose())));
  const SquareMatrix<Scalar, Dim> Jt = P.fullPivLu().solve(N);
  return g.G * Jt * g.G_inv;
}

/// Seeded test structure N = M J0 M^{-1} with cond(M) <= cond_bound. M is
/// assembled as U diag(sigma) V^T with Haar-random orthogonal U, V and
/// singular values in [1, cond_bound], so no resampling is needed.
template <class Scalar = double>
SquareMatrix<Scalar> random_acs(int n, std::uint64_t seed, Scalar cond_bound = Scalar(10)) {
  if (n < 1) throw Error(ErrorKind::invalid_input, "random_acs: n must be >= 1");
  if (!(cond_bound >= Scalar(1))) throw Error(ErrorKind::invalid_input, "random_acs: cond_bound must be >= 1");
  const int m = 2 * n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto haar = [&] {
    Eigen::MatrixXd z(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) z(i, j) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR();
    for (int j = 0; j < m; ++j)
      if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
  };
  const Eigen::MatrixXd U = haar();
  const Eigen::MatrixXd V = haar();
  Eigen::VectorXd sigma(m);
  const double log_bound = std::log(static_cast<double>(cond_bound));
  for (int i = 0; i < m; ++i) sigma(i) = std::exp(unit(rng) * log_bound);

  const Eigen::MatrixXd M = U * sigma.asDiagonal() * V.transpose();
  const Eigen::MatrixXd M_inv = V * sigma.cwiseInverse().asDiagonal() * U.transpose();
  const Eigen::MatrixXd J0 = standard_acs<double>(n);
  const Eigen::MatrixXd N = M * J0 * M_inv;
  return N.cast<Scalar>();
}

}  // namespace acs
