#include "field_kernels.hpp"

#include <cmath>

#include "acs/matalg.hpp"
#include "acs/parallel.hpp"

namespace acs::detail {

namespace {

template <int M>
using Mat = SquareMatrix<double, M>;
template <int M>
using Vec = ColumnVector<double, M>;

/// out += coeff * (A K_a - K_a A) with K_a = du e_a^T - e_a du^T, the
/// antisymmetric part of the conformal connection matrix Gamma_a.
template <int M, class A, class Out>
void add_connection(const A& a_mat, const double* du_ptr, int a, double coeff, Out& out) {
  const int m = static_cast<int>(a_mat.rows());
  Eigen::Map<const Vec<M>> du(du_ptr, m);
  const Vec<M> v = a_mat * du;
  const Eigen::Matrix<double, 1, M> w = du.transpose() * a_mat;
  out.col(a) += coeff * v;
  out.noalias() -= coeff * a_mat.col(a) * du.transpose();
  out.noalias() -= coeff * du * a_mat.row(a);
  out.row(a) += coeff * w;
}

template <int M>
void derivative_range(const StencilContext& c, const double* J, double* X, double* density, std::size_t begin,
                      std::size_t end) {
  const Grid& g = *c.grid;
  const int m = g.dim();
  const std::size_t s2 = static_cast<std::size_t>(m) * m;
  const double inv2h = 1.0 / (2.0 * g.spacing());
  const bool periodic = g.periodic();
  int multi[kMaxDim];
  auto mat = [&](std::size_t q) { return Eigen::Map<const Mat<M>>(J + q * s2, m, m); };

  Mat<M> scratch(m, m);
  for (std::size_t p = begin; p < end; ++p) {
    g.unravel(p, multi);
    double dens = 0;
    for (int a = 0; a < m; ++a) {
      Eigen::Map<Mat<M>> Xa(X ? X + (p * m + a) * s2 : scratch.data(), m, m);
      const int i = multi[a];
      const int e = g.extent(a);
      const std::ptrdiff_t s = g.stride(a);
      const auto ps = static_cast<std::ptrdiff_t>(p);
      if (periodic || (i > 0 && i < e - 1)) {
        const std::ptrdiff_t up = i == e - 1 ? ps - (e - 1) * s : ps + s;
        const std::ptrdiff_t down = i == 0 ? ps + (e - 1) * s : ps - s;
        Xa = (mat(up) - mat(down)) * inv2h;
      } else if (i == 0) {
        Xa = (-3.0 * mat(p) + 4.0 * mat(ps + s) - mat(ps + 2 * s)) * inv2h;
      } else {
        Xa = (3.0 * mat(p) - 4.0 * mat(ps - s) + mat(ps - 2 * s)) * inv2h;
      }
      if (!c.flat) add_connection<M>(mat(p), c.du(p), a, 0.5, Xa);
      if (density) dens += Xa.squaredNorm();
    }
    if (density) density[p] = dens * c.inverse_metric(p);
  }
}

template <int M>
void laplacian_range(const StencilContext& c, const double* X, double* lap, std::size_t begin, std::size_t end) {
  const Grid& g = *c.grid;
  const int m = g.dim();
  const std::size_t s2 = static_cast<std::size_t>(m) * m;
  const double inv2h = 1.0 / (2.0 * g.spacing());
  int multi[kMaxDim];
  auto xa = [&](std::size_t q, int a) { return Eigen::Map<const Mat<M>>(X + (q * m + a) * s2, m, m); };

  Mat<M> acc(m, m);
  Mat<M> conn(m, m);
  for (std::size_t p = begin; p < end; ++p) {
    Eigen::Map<Mat<M>> out(lap + p * s2, m, m);
    if (!c.counted[p]) {
      out.setZero();
      continue;
    }
    g.unravel(p, multi);
    acc.setZero();
    if (!c.flat) conn.setZero();
    for (int a = 0; a < m; ++a) {
      const int i = multi[a];
      const int e = g.extent(a);
      const std::ptrdiff_t s = g.stride(a);
      const auto ps = static_cast<std::ptrdiff_t>(p);
      const auto up = static_cast<std::size_t>(i == e - 1 ? ps - (e - 1) * s : ps + s);
      const auto down = static_cast<std::size_t>(i == 0 ? ps + (e - 1) * s : ps - s);
      if (c.counted[up]) acc += c.w(up) * xa(up, a);
      if (c.counted[down]) acc -= c.w(down) * xa(down, a);
      if (!c.flat) add_connection<M>(xa(p, a), c.du(p), a, 0.5, conn);
    }
    if (c.flat) {
      out = acc * inv2h;
    } else {
      out = (acc * inv2h + c.w(p) * conn) * c.inv_sqrtg[p];
    }
  }
}

template <int M>
void nonlinearity_at(const StencilContext& c, const double* J, const double* X, std::size_t p, Mat<M>& out) {
  const int m = c.grid->dim();
  const std::size_t s2 = static_cast<std::size_t>(m) * m;
  Eigen::Map<const Mat<M>> Jp(J + p * s2, m, m);
  Mat<M> sum = Mat<M>::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    Eigen::Map<const Mat<M>> Xa(X + (p * m + a) * s2, m, m);
    sum.noalias() += Xa * Xa;
  }
  out.noalias() = c.inverse_metric(p) * (Jp * sum);
}

}  // namespace

StencilContext::StencilContext(const Grid& g, const GridMetric& gm) : grid(&g), metric(&gm), flat(gm.flat) {
  if (gm.m != g.dim()) throw Error(ErrorKind::invalid_input, "metric samples do not match grid");
  if (g.dim() > kMaxDim) throw Error(ErrorKind::invalid_input, "dimension too large");
  const std::size_t n = g.size();
  counted.assign(n, 1);
  const int m = g.dim();
  if (!g.periodic() || !gm.inside.empty()) {
    parallel::for_range(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t p = b; p < e; ++p) counted[p] = (g.is_interior(p) && gm.integrates(p)) ? 1 : 0;
    });
  }
  if (!flat) {
    weight.resize(n);
    inv_sqrtg.resize(n);
    inv_g.resize(n);
    sqrtg.resize(n);
    parallel::for_range(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t p = b; p < e; ++p) {
        const double u = gm.u[p];
        weight[p] = std::exp((0.5 * m - 1.0) * u);
        inv_sqrtg[p] = std::exp(-0.5 * m * u);
        sqrtg[p] = std::exp(0.5 * m * u);
        inv_g[p] = std::exp(-u);
      }
    });
  }
}

void derivative_pass(const StencilContext& c, const double* J, double* X, double* density) {
  dispatch_dim(c.grid->dim(), [&](auto dim) {
    constexpr int M = decltype(dim)::value;
    parallel::for_range(c.grid->size(),
                        [&](std::size_t b, std::size_t e) { derivative_range<M>(c, J, X, density, b, e); });
  });
}

void laplacian_pass(const StencilContext& c, const double* X, double* lap) {
  dispatch_dim(c.grid->dim(), [&](auto dim) {
    constexpr int M = decltype(dim)::value;
    parallel::for_range(c.grid->size(), [&](std::size_t b, std::size_t e) { laplacian_range<M>(c, X, lap, b, e); });
  });
}

void nonlinearity_pass(const StencilContext& c, const double* J, const double* X, double* nl) {
  dispatch_dim(c.grid->dim(), [&](auto dim) {
    constexpr int M = decltype(dim)::value;
    const int m = c.grid->dim();
    const std::size_t s2 = static_cast<std::size_t>(m) * m;
    parallel::for_range(c.grid->size(), [&](std::size_t b, std::size_t e) {
      Mat<M> tmp(m, m);
      for (std::size_t p = b; p < e; ++p) {
        nonlinearity_at<M>(c, J, X, p, tmp);
        Eigen::Map<Mat<M>>(nl + p * s2, m, m) = tmp;
      }
    });
  });
}

void residual_pass(const StencilContext& c, const double* J, const double* X, double* R) {
  laplacian_pass(c, X, R);
  dispatch_dim(c.grid->dim(), [&](auto dim) {
    constexpr int M = decltype(dim)::value;
    const int m = c.grid->dim();
    const std::size_t s2 = static_cast<std::size_t>(m) * m;
    parallel::for_range(c.grid->size(), [&](std::size_t b, std::size_t e) {
      Mat<M> tmp(m, m);
      for (std::size_t p = b; p < e; ++p) {
        if (!c.counted[p]) continue;
        nonlinearity_at<M>(c, J, X, p, tmp);
        Eigen::Map<Mat<M>>(R + p * s2, m, m) -= tmp;
      }
    });
  });
}

double quadrature(const StencilContext& c, const std::function<double(std::size_t)>& term) {
  const double vol = c.grid->cell_volume();
  return vol * parallel::sum(c.grid->size(), [&](std::size_t p) {
           return c.counted[p] ? term(p) * c.jacobian(p) : 0.0;
         });
}

double central_difference(const Grid& g, const double* data, int width, std::size_t p, const int* multi, int a,
                          int component) {
  const int i = multi[a];
  const int e = g.extent(a);
  const std::ptrdiff_t s = g.stride(a);
  const auto ps = static_cast<std::ptrdiff_t>(p);
  const double inv2h = 1.0 / (2.0 * g.spacing());
  auto at = [&](std::ptrdiff_t q) { return data[q * width + component]; };
  if (g.periodic() || (i > 0 && i < e - 1)) {
    const std::ptrdiff_t up = i == e - 1 ? ps - (e - 1) * s : ps + s;
    const std::ptrdiff_t down = i == 0 ? ps + (e - 1) * s : ps - s;
    return (at(up) - at(down)) * inv2h;
  }
  if (i == 0) return (-3.0 * at(ps) + 4.0 * at(ps + s) - at(ps + 2 * s)) * inv2h;
  return (3.0 * at(ps) - 4.0 * at(ps - s) + at(ps - 2 * s)) * inv2h;
}

}  // namespace acs::detail
